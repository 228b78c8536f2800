//! Construction of the parametric LP for projection and convex hull.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{ineq_lp_exact, ineq_lp_f64, AffineRow, IneqOutcome, LpProblem, DEFAULT_THRESHOLD};
use crate::matrix::{row_echelon, RationalMatrix};
use crate::types::{from_f64, int, to_f64, Constraint, FloatPoint, Point, Polyhedron, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlpKind {
    /// Parameters are the kept coordinates, in ascending order.
    Projection {
        eliminated: Vec<usize>,
        kept: Vec<usize>,
    },
    Hull,
}

/// Minimize `(Oᵀ (x, 1))·λ` subject to `M λ = rhs`, `λ ≥ 0`.
///
/// Columns of `M` and `O` are the LP variables followed by one right-hand
/// side column (zero in `O`). Row 0 of `M` is the normalization row; `O` has
/// one row per parameter and a final constant row.
#[derive(Clone, Debug)]
pub struct PlpProblem {
    kind: PlpKind,
    m: RationalMatrix,
    o: RationalMatrix,
    point: Point,
    m_float: Vec<Vec<f64>>,
    rhs_float: Vec<f64>,
    /// Parametric part of `O` as floats, one row per parameter.
    o_float: Vec<Vec<f64>>,
    column_names: Vec<String>,
}

impl PlpProblem {
    fn build(
        kind: PlpKind,
        m: RationalMatrix,
        o: RationalMatrix,
        point: Point,
        column_names: Vec<String>,
    ) -> Result<Self> {
        let m = independent_rows(&m)?;
        let vars = m.cols() - 1;
        let full = m.to_f64()?;
        let m_float = full.iter().map(|r| r[..vars].to_vec()).collect();
        let rhs_float = full.iter().map(|r| r[vars]).collect();
        let o_float = o.to_f64()?[..o.rows() - 1].iter().map(|r| r[..vars].to_vec()).collect();
        Ok(Self {
            kind,
            m,
            o,
            point,
            m_float,
            rhs_float,
            o_float,
            column_names,
        })
    }

    pub fn kind(&self) -> &PlpKind {
        &self.kind
    }

    /// Constraint matrix with the right-hand side as last column.
    pub fn m(&self) -> &RationalMatrix {
        &self.m
    }

    pub fn o(&self) -> &RationalMatrix {
        &self.o
    }

    /// Normalization point in parameter space. Every region is a cone
    /// apexed here and every optimal function is 1 here.
    pub fn normalization_point(&self) -> &Point {
        &self.point
    }

    pub fn num_rows(&self) -> usize {
        self.m.rows()
    }

    pub fn num_vars(&self) -> usize {
        self.m.cols() - 1
    }

    pub fn param_dim(&self) -> usize {
        self.o.rows() - 1
    }

    /// Display name of LP column `j`.
    pub fn column_name(&self, j: usize) -> &str {
        &self.column_names[j]
    }

    /// Objective at `y = x - p`. The constant part `O_cᵀ + O_xᵀ p` lies in the
    /// row space of `M`, so it only shifts the objective by a constant.
    pub fn objective_f64(&self, y: &[f64]) -> Vec<f64> {
        (0..self.num_vars())
            .map(|j| self.o_float.iter().zip(y).map(|(r, v)| r[j] * v).sum())
            .collect()
    }

    pub fn objective_exact(&self, y: &[Rational]) -> Vec<Rational> {
        (0..self.num_vars())
            .map(|j| {
                y.iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (k, v)| acc + &self.o[(k, j)] * v)
            })
            .collect()
    }

    pub fn float_lp(&self, y: &[f64]) -> Result<LpProblem<f64>> {
        LpProblem::new(self.m_float.clone(), self.rhs_float.clone(), self.objective_f64(y))
    }

    pub fn exact_lp(&self, y: &[Rational]) -> Result<LpProblem<Rational>> {
        let vars = self.num_vars();
        let rows = self.m.to_rows();
        let a = rows.iter().map(|r| r[..vars].to_vec()).collect();
        let b = rows.iter().map(|r| r[vars].clone()).collect();
        LpProblem::new(a, b, self.objective_exact(y))
    }

    /// Parameter point `x` to shifted coordinates `y = x - p`.
    pub fn to_shifted(&self, x: &[f64]) -> Result<FloatPoint> {
        if x.len() != self.param_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim(),
                found: x.len(),
            });
        }
        self.point.iter().zip(x).map(|(p, v)| Ok(v - to_f64(p)?)).collect()
    }
}

/// Drops rows of `m` that are linear combinations of earlier ones. The
/// system is always consistent, so nothing is lost.
fn independent_rows(m: &RationalMatrix) -> Result<RationalMatrix> {
    let vars = m.cols() - 1;
    let coeffs = m.select_columns(&(0..vars).collect::<Vec<_>>()).transpose();
    let ech = row_echelon(&coeffs, &(0..m.rows()).collect::<Vec<_>>())?;
    let keep: Vec<usize> = ech
        .pivots
        .iter()
        .enumerate()
        .filter_map(|(r, p)| p.map(|_| r))
        .collect();
    Ok(m.select_rows(&keep))
}

/// A point where every row of `p` holds strictly, with small denominators
/// when possible.
pub fn interior_point_exact(p: &Polyhedron) -> Result<Point> {
    if p.is_trivially_unsatisfiable() {
        return Err(Error::EmptyPolyhedron);
    }
    let dim = p.dim();
    if p.is_empty() {
        return Ok(vec![Rational::zero(); dim]);
    }
    if let Some(x) = chebyshev_guess(p) {
        for shift in 0..=10 {
            let denom = 1i64 << shift;
            let candidate: Point = x
                .iter()
                .map(|v| Rational::new(((v * denom as f64).round() as i64).into(), denom.into()))
                .collect();
            if p.contains_strictly(&candidate)? {
                return Ok(candidate);
            }
        }
        if let Ok(exact) = x.iter().map(|v| from_f64(*v)).collect::<Result<Point>>() {
            if p.contains_strictly(&exact)? {
                return Ok(exact);
            }
        }
    }
    // Exact fallback: maximize the smallest slack, capped at 1.
    let mut rows: Vec<AffineRow<Rational>> = p
        .rows()
        .iter()
        .map(|c| {
            let mut coeffs = c.coeffs().to_vec();
            coeffs.push(-Rational::one());
            (coeffs, c.constant().clone())
        })
        .collect();
    let mut cap = vec![Rational::zero(); dim];
    cap.push(-Rational::one());
    rows.push((cap, Rational::one()));
    let mut objective = vec![Rational::zero(); dim];
    objective.push(Rational::one());
    match ineq_lp_exact(dim + 1, &rows, &[], &objective) {
        IneqOutcome::Optimal(mut x) => {
            let s = x.pop().expect("slack variable");
            if s.is_positive() {
                Ok(x)
            } else if s.is_zero() {
                Err(Error::NoInterior)
            } else {
                Err(Error::EmptyPolyhedron)
            }
        }
        _ => Err(Error::EmptyPolyhedron),
    }
}

fn chebyshev_guess(p: &Polyhedron) -> Option<FloatPoint> {
    let dim = p.dim();
    let mut rows: Vec<AffineRow<f64>> = Vec::with_capacity(p.len() + 1);
    for r in p.float_mirror().rows() {
        let n = r.norm();
        if n == 0.0 {
            return None;
        }
        let mut coeffs: Vec<f64> = r.coeffs.iter().map(|a| a / n).collect();
        coeffs.push(-1.0);
        rows.push((coeffs, r.constant / n));
    }
    let mut cap = vec![0.0; dim];
    cap.push(-1.0);
    rows.push((cap, 1.0));
    let mut objective = vec![0.0; dim];
    objective.push(1.0);
    match ineq_lp_f64(dim + 1, &rows, &[], &objective, DEFAULT_THRESHOLD) {
        IneqOutcome::Optimal(mut x) => {
            let s = x.pop()?;
            (s > 0.0).then_some(x)
        }
        _ => None,
    }
}

fn lambda_names(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}{i}"))
}

/// PLP whose optimal functions are the faces of the projection of `poly`
/// onto the coordinates not in `eliminate` (0-based).
pub fn construct_projection(poly: &Polyhedron, eliminate: &[usize]) -> Result<PlpProblem> {
    let dim = poly.dim();
    let mut eliminated = eliminate.to_vec();
    eliminated.sort_unstable();
    eliminated.dedup();
    if let Some(&bad) = eliminated.iter().find(|&&j| j >= dim) {
        return Err(Error::InvalidArgument(format!(
            "variable index {} exceeds dimension {dim}",
            bad + 1
        )));
    }
    let kept: Vec<usize> = (0..dim).filter(|j| eliminated.binary_search(j).is_err()).collect();
    let p = interior_point_exact(poly)?;
    let rows: Vec<Constraint> = poly.normalized().rows().to_vec();
    let n = rows.len();

    // Columns: λ1..λn, λ0, right-hand side.
    let mut m = RationalMatrix::zeros(1 + eliminated.len(), n + 2);
    for (i, r) in rows.iter().enumerate() {
        m[(0, i)] = r.eval(&p)?;
        for (k, &j) in eliminated.iter().enumerate() {
            m[(1 + k, i)] = r.coeffs()[j].clone();
        }
    }
    m[(0, n)] = Rational::one();
    m[(0, n + 1)] = Rational::one();

    let mut o = RationalMatrix::zeros(kept.len() + 1, n + 2);
    for (i, r) in rows.iter().enumerate() {
        for (k, &j) in kept.iter().enumerate() {
            o[(k, i)] = r.coeffs()[j].clone();
        }
        o[(kept.len(), i)] = r.constant().clone();
    }
    o[(kept.len(), n)] = Rational::one();

    let point = kept.iter().map(|&j| p[j].clone()).collect();
    let names = lambda_names("l", n).chain(["l0".to_string()]).collect();
    PlpProblem::build(PlpKind::Projection { eliminated, kept }, m, o, point, names)
}

/// PLP whose optimal functions are the faces of the closed convex hull of
/// `p1` and `p2`.
pub fn construct_hull(p1: &Polyhedron, p2: &Polyhedron) -> Result<PlpProblem> {
    if p1.dim() != p2.dim() {
        return Err(Error::DimensionMismatch {
            expected: p1.dim(),
            found: p2.dim(),
        });
    }
    let dim = p1.dim();
    // The normalization point must be interior to the hull; an interior
    // point of either input will do.
    let (first, second, p) = match interior_point_exact(p1) {
        Ok(p) => {
            interior_point_exact(p2).or_else(|e| match e {
                Error::NoInterior => Ok(Vec::new()),
                e => Err(e),
            })?;
            (p1, p2, p)
        }
        Err(Error::NoInterior) => (p2, p1, interior_point_exact(p2)?),
        Err(e) => return Err(e),
    };
    let a: Vec<Constraint> = first.normalized().rows().to_vec();
    let b: Vec<Constraint> = second.normalized().rows().to_vec();
    let (n1, n2) = (a.len(), b.len());
    // Columns: λ (n1), λ0, λ′ (n2), λ0′, right-hand side.
    let l0 = n1;
    let lp = n1 + 1;
    let l0p = n1 + 1 + n2;
    let rhs = l0p + 1;

    let mut m = RationalMatrix::zeros(dim + 2, rhs + 1);
    for (i, r) in a.iter().enumerate() {
        m[(0, i)] = r.eval(&p)?;
        for k in 0..dim {
            m[(1 + k, i)] = r.coeffs()[k].clone();
        }
        m[(dim + 1, i)] = r.constant().clone();
    }
    m[(0, l0)] = Rational::one();
    m[(0, rhs)] = Rational::one();
    for (i, r) in b.iter().enumerate() {
        for k in 0..dim {
            m[(1 + k, lp + i)] = -r.coeffs()[k].clone();
        }
        m[(dim + 1, lp + i)] = -r.constant().clone();
    }
    m[(dim + 1, l0)] = Rational::one();
    m[(dim + 1, l0p)] = int(-1);

    let mut o = RationalMatrix::zeros(dim + 1, rhs + 1);
    for (i, r) in a.iter().enumerate() {
        for k in 0..dim {
            o[(k, i)] = r.coeffs()[k].clone();
        }
        o[(dim, i)] = r.constant().clone();
    }
    o[(dim, l0)] = Rational::one();

    let names = lambda_names("l", n1)
        .chain(["l0".to_string()])
        .chain(lambda_names("m", n2))
        .chain(["m0".to_string()])
        .collect();
    PlpProblem::build(PlpKind::Hull, m, o, p, names)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::frac;

    fn square() -> Polyhedron {
        Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1]]).unwrap()
    }

    #[test]
    fn square_point_is_center() {
        assert_eq!(interior_point_exact(&square()).unwrap(), vec![frac(1, 2), frac(1, 2)]);
    }

    #[test]
    fn empty_and_flat_inputs() {
        let empty = Polyhedron::from_ints(1, &[&[1, -2], &[-1, 1]]).unwrap();
        assert!(matches!(interior_point_exact(&empty), Err(Error::EmptyPolyhedron)));
        let flat = Polyhedron::from_ints(1, &[&[1, -1], &[-1, 1]]).unwrap();
        assert!(matches!(interior_point_exact(&flat), Err(Error::NoInterior)));
    }

    #[test]
    fn projection_layout() {
        let plp = construct_projection(&square(), &[1]).unwrap();
        // Normalization row and one row for x2.
        assert_eq!(plp.num_rows(), 2);
        assert_eq!(plp.num_vars(), 5);
        assert_eq!(plp.param_dim(), 1);
        assert_eq!(plp.normalization_point(), &vec![frac(1, 2)]);
        let m = plp.m();
        assert_eq!(
            m.row(0),
            &[frac(1, 2), frac(1, 2), frac(1, 2), frac(1, 2), int(1), int(1)]
        );
        assert_eq!(m.row(1), &[int(0), int(0), int(1), int(-1), int(0), int(0)]);
        // λ0 = 1 is feasible.
        let o = plp.o();
        assert_eq!(o.row(1), &[int(0), int(1), int(0), int(1), int(1), int(0)]);
    }

    #[test]
    fn dependent_rows_are_dropped() {
        // x2 never appears: its elimination row is zero.
        let strip = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1]]).unwrap();
        let plp = construct_projection(&strip, &[1]).unwrap();
        assert_eq!(plp.num_rows(), 1);
    }

    #[test]
    fn hull_layout() {
        let a = Polyhedron::from_ints(1, &[&[1, 0], &[-1, 1]]).unwrap();
        let b = Polyhedron::from_ints(1, &[&[1, -2], &[-1, 3]]).unwrap();
        let plp = construct_hull(&a, &b).unwrap();
        assert_eq!(plp.num_vars(), 6);
        assert_eq!(plp.num_rows(), 3);
        assert_eq!(plp.column_name(4), "m2");
    }

    #[test]
    fn shifted_objective_vanishes_at_apex() {
        let plp = construct_projection(&square(), &[1]).unwrap();
        assert!(plp.objective_exact(&[int(0)]).iter().all(Zero::is_zero));
    }
}
