//! Farkas certificates for implied constraints.

use num_traits::{One, Signed, Zero};

use super::{float_simplex, rational_simplex, FloatOutcome, FloatSimplexOptions, LpProblem};
use crate::checkers::{verify_feasible_basis, BasisCheck};
use crate::matrix::RationalMatrix;
use crate::types::{Constraint, Rational};

/// Nonnegative multipliers with `Σ μᵢ·Cᵢ + μ₀ = target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
    pub constant: Rational,
}

impl FarkasCertificate {
    /// Exact re-multiplication check.
    pub fn verify(&self, target: &Constraint, others: &[Constraint]) -> bool {
        if self.multipliers.len() != others.len()
            || self.constant.is_negative()
            || self.multipliers.iter().any(Signed::is_negative)
        {
            return false;
        }
        let dim = target.dim();
        let mut coeffs = vec![Rational::zero(); dim];
        let mut constant = self.constant.clone();
        for (mu, c) in self.multipliers.iter().zip(others) {
            if c.dim() != dim {
                return false;
            }
            if mu.is_zero() {
                continue;
            }
            for (acc, a) in coeffs.iter_mut().zip(c.coeffs()) {
                *acc += mu * a;
            }
            constant += mu * c.constant();
        }
        coeffs == target.coeffs() && &constant == target.constant()
    }
}

/// Columns are the rows of `others` plus one for the constant slack; the
/// last column is the target.
fn farkas_system(target: &Constraint, others: &[Constraint]) -> RationalMatrix {
    let dim = target.dim();
    let n = others.len();
    let mut m = RationalMatrix::zeros(dim + 1, n + 2);
    for (j, c) in others.iter().enumerate() {
        for (k, a) in c.coeffs().iter().enumerate() {
            m[(k, j)] = a.clone();
        }
        m[(dim, j)] = c.constant().clone();
    }
    m[(dim, n)] = Rational::one();
    for (k, a) in target.coeffs().iter().enumerate() {
        m[(k, n + 1)] = a.clone();
    }
    m[(dim, n + 1)] = target.constant().clone();
    m
}

fn system_lp(m: &RationalMatrix) -> LpProblem<Rational> {
    let vars = m.cols() - 1;
    let rows = m.to_rows();
    let a = rows.iter().map(|r| r[..vars].to_vec()).collect();
    let b = rows.iter().map(|r| r[vars].clone()).collect();
    LpProblem::new(a, b, vec![Rational::zero(); vars]).expect("consistent shapes")
}

fn certificate(values: Vec<Rational>) -> FarkasCertificate {
    let mut multipliers = values;
    let constant = multipliers.pop().expect("constant slack column");
    FarkasCertificate { multipliers, constant }
}

/// Decides exactly whether `target` is implied by `others` through a
/// nonnegative combination. `None` means the target is irredundant with
/// respect to `others` (for a nonempty polyhedron).
pub fn farkas_combination(target: &Constraint, others: &[Constraint]) -> Option<FarkasCertificate> {
    let m = farkas_system(target, others);
    match rational_simplex(&system_lp(&m)) {
        super::RationalOutcome::Optimal { values, .. } => {
            let cert = certificate(values);
            debug_assert!(cert.verify(target, others));
            Some(cert)
        }
        _ => None,
    }
}

/// Same answer as [`farkas_combination`], but first tries the basis found by
/// the float solver and only runs the exact simplex if that basis does not
/// check out.
pub fn farkas_combination_hinted(target: &Constraint, others: &[Constraint], t: f64) -> Option<FarkasCertificate> {
    let m = farkas_system(target, others);
    if let Ok(float) = system_lp(&m).to_float() {
        if let Ok(FloatOutcome::Optimal(basis)) = float_simplex(&float, &FloatSimplexOptions::with_threshold(t)) {
            if let BasisCheck::Verified(values) = verify_feasible_basis(&m, basis.basic()) {
                let cert = certificate(values);
                if cert.verify(target, others) {
                    return Some(cert);
                }
            }
        }
    }
    farkas_combination(target, others)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{int, Constraint};

    /// The four-row example: C1: x1 - 2x2 <= -2, C2: -2x1 + x2 <= -1,
    /// C3: x1 + x2 <= 8, C4: -2x1 - 4x2 <= -7, rewritten as `≥ 0` rows.
    pub(crate) fn example_rows() -> Vec<Constraint> {
        vec![
            Constraint::from_ints(&[-1, 2, -2]),
            Constraint::from_ints(&[2, -1, -1]),
            Constraint::from_ints(&[-1, -1, 8]),
            Constraint::from_ints(&[2, 4, -7]),
        ]
    }

    #[test]
    fn c4_is_implied() {
        let rows = example_rows();
        let cert = farkas_combination(&rows[3], &rows[..3]).expect("redundant");
        assert!(cert.verify(&rows[3], &rows[..3]));
        let hinted = farkas_combination_hinted(&rows[3], &rows[..3], 1e-7).unwrap();
        assert!(hinted.verify(&rows[3], &rows[..3]));
    }

    #[test]
    fn verbatim_copy_is_implied() {
        let rows = example_rows();
        let cert = farkas_combination(&rows[1], &rows).unwrap();
        assert!(cert.verify(&rows[1], &rows));
    }

    #[test]
    fn independent_direction_is_not_implied() {
        let target = Constraint::from_ints(&[1, 0, 0]);
        let others = [Constraint::from_ints(&[0, 1, 0])];
        assert_eq!(farkas_combination(&target, &others), None);
        assert_eq!(farkas_combination_hinted(&target, &others, 1e-7), None);
    }

    #[test]
    fn facets_are_not_implied() {
        let rows = example_rows();
        for i in 0..3 {
            let others: Vec<Constraint> = (0..3).filter(|&j| j != i).map(|j| rows[j].clone()).collect();
            assert_eq!(farkas_combination(&rows[i], &others), None, "row {i}");
        }
    }

    #[test]
    fn tampered_certificate_fails() {
        let rows = example_rows();
        let mut cert = farkas_combination(&rows[3], &rows[..3]).unwrap();
        cert.constant += int(1);
        assert!(!cert.verify(&rows[3], &rows[..3]));
    }
}
