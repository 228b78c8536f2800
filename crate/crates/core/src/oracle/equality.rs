//! Geometric equality of polyhedra by mutual Farkas entailment.

use num_traits::{One, Zero};

use crate::lp::{farkas_combination_hinted, ineq_lp_exact, AffineRow, IneqOutcome};
use crate::types::{Constraint, Point, Polyhedron, Rational};

/// A row of one polyhedron and a point of the other that violates it.
#[derive(Clone, Debug, PartialEq)]
pub struct Separation {
    pub direction: Constraint,
    pub point: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EqualityVerdict {
    pub equal: bool,
    /// Present exactly when `equal` is false.
    pub witness: Option<Separation>,
}

fn rows_of(p: &Polyhedron) -> Vec<AffineRow<Rational>> {
    p.rows()
        .iter()
        .map(|c| (c.coeffs().to_vec(), c.constant().clone()))
        .collect()
}

fn is_empty(p: &Polyhedron) -> bool {
    p.is_trivially_unsatisfiable()
        || matches!(
            ineq_lp_exact(p.dim(), &rows_of(p), &[], &vec![Rational::zero(); p.dim()]),
            IneqOutcome::Infeasible
        )
}

/// Point of `p` where `row` is negative, if any.
fn violating_point(p: &Polyhedron, row: &Constraint) -> Option<Point> {
    let mut rows = rows_of(p);
    // row(x) ≥ -1 keeps the search bounded.
    rows.push((row.coeffs().to_vec(), row.constant() + Rational::one()));
    let objective: Vec<Rational> = row.coeffs().iter().map(|a| -a).collect();
    match ineq_lp_exact(p.dim(), &rows, &[], &objective) {
        IneqOutcome::Optimal(x) if row.eval(&x).ok()? < Rational::zero() => Some(x),
        _ => None,
    }
}

/// `a ⊆ b`: every row of `b` holds on `a`. On failure returns a row of `b`
/// and a point of `a` violating it.
pub fn entails(a: &Polyhedron, b: &Polyhedron) -> Result<(), Separation> {
    let mut empty: Option<bool> = None;
    for row in b.rows() {
        if farkas_combination_hinted(row, a.rows(), 1e-9).is_some() {
            continue;
        }
        if *empty.get_or_insert_with(|| is_empty(a)) {
            return Ok(());
        }
        let point = violating_point(a, row).expect("row is not entailed by a nonempty polyhedron");
        return Err(Separation {
            direction: row.clone(),
            point,
        });
    }
    Ok(())
}

pub fn poly_equal(a: &Polyhedron, b: &Polyhedron) -> EqualityVerdict {
    if a.dim() != b.dim() {
        return EqualityVerdict {
            equal: false,
            witness: None,
        };
    }
    match entails(a, b).and_then(|_| entails(b, a)) {
        Ok(()) => EqualityVerdict {
            equal: true,
            witness: None,
        },
        Err(s) => EqualityVerdict {
            equal: false,
            witness: Some(s),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polyhedron {
        Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1]]).unwrap()
    }

    #[test]
    fn verbatim_copy_is_equal() {
        assert!(poly_equal(&square(), &square()).equal);
    }

    #[test]
    fn missing_side_is_detected() {
        let open = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0]]).unwrap();
        let v = poly_equal(&open, &square());
        assert!(!v.equal);
        let s = v.witness.unwrap();
        assert!(open.contains(&s.point).unwrap());
        assert!(!square().contains(&s.point).unwrap());
    }

    #[test]
    fn redundant_rows_do_not_matter() {
        let extra = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1], &[1, 1, 1]]).unwrap();
        let v = poly_equal(&extra, &square());
        assert!(v.equal && v.witness.is_none());
    }

    #[test]
    fn symmetric() {
        let open = Polyhedron::from_ints(2, &[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(poly_equal(&open, &square()).equal, poly_equal(&square(), &open).equal);
    }
}
