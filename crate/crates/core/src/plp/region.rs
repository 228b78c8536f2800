//! Regions of the parametric LP and their optimal functions.

use num_traits::{Signed, Zero};

use crate::checkers::{verify_feasible_basis, BasisCheck};
use crate::error::{Error, Result};
use crate::lp::{ineq_lp_exact, AffineRow, BasisPartition, IneqOutcome};
use crate::matrix::{reconstruct_objective, RationalMatrix};
use crate::minimize::{interior_point, minimize_exact};
use crate::types::{dot, point_from_f64, Constraint, FloatPoint, Point, Polyhedron, Rational};

use super::problem::PlpProblem;

/// Affine function `Z*(x)` over the parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OptimalFunction(Constraint);

impl OptimalFunction {
    pub fn new(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Self(Constraint::new(coeffs, constant))
    }

    pub fn coeffs(&self) -> &[Rational] {
        self.0.coeffs()
    }

    pub fn constant(&self) -> &Rational {
        self.0.constant()
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        self.0.eval(x)
    }

    /// The trivial solution `Z* = 1`.
    pub fn is_constant(&self) -> bool {
        self.0.is_constant()
    }

    /// The output constraint `Z*(x) ≥ 0`.
    pub fn as_constraint(&self) -> &Constraint {
        &self.0
    }
}

/// A facet of a region: the row in shifted coordinates, the LP columns whose
/// reduced cost it is, and a point violating only this row.
#[derive(Clone, Debug, PartialEq)]
pub struct Frontier {
    pub row: Constraint,
    pub columns: Vec<usize>,
    pub witness: Point,
}

#[derive(Clone, Debug)]
pub struct Region {
    pub id: usize,
    /// Regions sharing an optimal function share a group.
    pub group: usize,
    pub basis: BasisPartition,
    /// Exact optimal λ, one entry per LP column.
    pub values: Vec<Rational>,
    pub optimal: OptimalFunction,
    /// Minimized cone in shifted coordinates `y = x - p`; one row per
    /// frontier, in the same order.
    pub cone: Polyhedron,
    pub frontiers: Vec<Frontier>,
    /// Strictly interior point of the cone.
    pub interior: Point,
}

impl Region {
    pub fn contains_strictly(&self, y: &[Rational]) -> bool {
        self.cone.contains_strictly(y).unwrap_or(false)
    }

    /// Float prefilter for [`Region::contains_strictly`].
    pub fn may_contain(&self, y: &[f64]) -> bool {
        let scale = 1.0 + y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.cone
            .float_mirror()
            .rows()
            .iter()
            .all(|r| r.eval(y) > -1e-9 * scale * r.norm())
    }

    /// Index of the frontier whose row is `-row` up to positive scaling.
    pub fn opposite_frontier(&self, row: &Constraint) -> Option<usize> {
        let target = row.negated().normalized();
        self.frontiers.iter().position(|f| f.row == target)
    }

    /// The region as a polyhedron over the original parameters.
    pub fn in_parameters(&self, apex: &[Rational]) -> Polyhedron {
        let rows = self
            .cone
            .rows()
            .iter()
            .map(|r| Constraint::new(r.coeffs().to_vec(), -dot(r.coeffs(), apex)))
            .collect();
        Polyhedron::new(apex.len(), rows).expect("same dimension")
    }
}

/// Region rows `(O′_{x,j})ᵀ y ≥ 0` for every nonbasic column `j` with a
/// nonzero parametric part, tagged with `j`, and the optimal function read
/// from the last column of `O′`.
pub fn extract_region(
    o_prime: &RationalMatrix,
    nonbasic: &[usize],
    apex: &[Rational],
) -> Result<(Vec<(Constraint, usize)>, OptimalFunction)> {
    let d = o_prime.rows() - 1;
    let last = o_prime.cols() - 1;
    let mut rows = Vec::new();
    for &j in nonbasic.iter().filter(|&&j| j < last) {
        let coeffs: Vec<Rational> = (0..d).map(|k| o_prime[(k, j)].clone()).collect();
        let constant = &o_prime[(d, j)];
        if coeffs.iter().all(Zero::is_zero) {
            if constant.is_negative() {
                return Err(Error::Consistency(format!("column {j} has a negative constant cost")));
            }
            continue;
        }
        if constant != &-dot(&coeffs, apex) {
            return Err(Error::Consistency(format!("region row {j} misses the apex")));
        }
        rows.push((Constraint::new(coeffs, Rational::zero()), j));
    }
    let optimal = OptimalFunction::new(
        (0..d).map(|k| -o_prime[(k, last)].clone()).collect(),
        -o_prime[(d, last)].clone(),
    );
    Ok((rows, optimal))
}

/// A verified feasible basis with its reconstructed objective.
#[derive(Clone, Debug)]
pub struct BasisAnalysis {
    pub basis: BasisPartition,
    pub values: Vec<Rational>,
    pub optimal: OptimalFunction,
    pub rows: Vec<(Constraint, usize)>,
}

impl BasisAnalysis {
    pub fn is_degenerate(&self) -> bool {
        self.basis.basic().iter().any(|&j| self.values[j].is_zero())
    }
}

pub fn analyze_basis(plp: &PlpProblem, basic: &[usize]) -> Result<BasisAnalysis> {
    let values = match verify_feasible_basis(plp.m(), basic) {
        BasisCheck::Verified(v) if basic.len() == plp.num_rows() => v,
        other => {
            return Err(Error::Consistency(format!(
                "basis {basic:?} is not feasible: {other:?}"
            )))
        }
    };
    let basis = BasisPartition::new(basic.to_vec(), plp.num_vars());
    let (_, o_prime) = reconstruct_objective(plp.m(), plp.o(), basic)?;
    let (rows, optimal) = extract_region(&o_prime, basis.nonbasic(), plp.normalization_point())?;
    if optimal.eval(plp.normalization_point())? != Rational::from_integer(1.into()) {
        return Err(Error::Consistency("optimal function is not normalized".into()));
    }
    Ok(BasisAnalysis {
        basis,
        values,
        optimal,
        rows,
    })
}

/// Minimized region of an analyzed basis, or `None` when its interior is
/// empty. `id` and `group` are left at 0.
pub fn build_region(analysis: &BasisAnalysis, t: f64) -> Result<Option<Region>> {
    let dim = analysis.optimal.coeffs().len();
    let mut unique: Vec<(Constraint, Vec<usize>)> = Vec::new();
    for (row, j) in &analysis.rows {
        let n = row.normalized();
        match unique.iter_mut().find(|(r, _)| *r == n) {
            Some((_, cols)) => cols.push(*j),
            None => unique.push((n, vec![*j])),
        }
    }
    let cone = Polyhedron::new(dim, unique.iter().map(|(r, _)| r.clone()).collect())?;
    let Some(min) = minimize_exact(&cone, t)? else {
        return Ok(None);
    };
    let frontiers: Vec<Frontier> = min
        .kept
        .iter()
        .zip(min.witnesses)
        .map(|(&i, witness)| Frontier {
            row: unique[i].0.clone(),
            columns: unique[i].1.clone(),
            witness,
        })
        .collect();
    let cone = cone.select(&min.kept);
    let interior = cone_interior(&cone)?;
    Ok(Some(Region {
        id: 0,
        group: 0,
        basis: analysis.basis.clone(),
        values: analysis.values.clone(),
        optimal: analysis.optimal.clone(),
        cone,
        frontiers,
        interior,
    }))
}

/// Strictly interior point of a full-dimensional cone, inside the unit box
/// when the float search succeeds.
pub fn cone_interior(cone: &Polyhedron) -> Result<Point> {
    let dim = cone.dim();
    if let Ok(y) = interior_point(cone.float_mirror(), 1e-9) {
        let exact = point_from_f64(&round_point(&y))?;
        if cone.contains_strictly(&exact)? {
            return Ok(exact);
        }
        let exact = point_from_f64(&y)?;
        if cone.contains_strictly(&exact)? {
            return Ok(exact);
        }
    }
    let rows: Vec<AffineRow<Rational>> = cone
        .rows()
        .iter()
        .map(|r| (r.coeffs().to_vec(), Rational::from_integer((-1).into())))
        .collect();
    match ineq_lp_exact(dim, &rows, &[], &vec![Rational::zero(); dim]) {
        IneqOutcome::Optimal(y) => Ok(y),
        _ => Err(Error::NoInterior),
    }
}

/// Rounds to 2⁻²⁰ to keep exact coordinates short.
fn round_point(y: &[f64]) -> FloatPoint {
    const SCALE: f64 = (1u64 << 20) as f64;
    y.iter().map(|v| (v * SCALE).round() / SCALE).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plp::problem::construct_projection;
    use crate::types::{frac, int};

    #[test]
    fn hand_pivot_on_single_row() {
        // M = [1 1 | 1], O = [[1, 0, 0]]: basis {0} prices column 1 at -1.
        let m = RationalMatrix::from_i64(&[&[1, 1, 1]]);
        let o = RationalMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 0]]);
        let (_, o_prime) = reconstruct_objective(&m, &o, &[0]).unwrap();
        assert!(o_prime.column(0).iter().all(Zero::is_zero));
        let (rows, z) = extract_region(&o_prime, &[1], &[int(0)]).unwrap();
        assert_eq!(rows, vec![(Constraint::new(vec![int(-1)], int(0)), 1)]);
        assert_eq!(z, OptimalFunction::new(vec![int(1)], int(0)));
    }

    #[test]
    fn constant_only_columns_give_the_whole_space() {
        let o_prime = RationalMatrix::from_i64(&[&[0, 0, 0], &[0, 2, -1]]);
        let (rows, z) = extract_region(&o_prime, &[1], &[int(0)]).unwrap();
        assert!(rows.is_empty());
        assert!(z.is_constant());
    }

    #[test]
    fn square_projection_bases() {
        let square = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1]]).unwrap();
        let plp = construct_projection(&square, &[1]).unwrap();
        // λ1 = 2 on x1 ≥ 0, λ3 = 0 on the x2 row.
        let a = analyze_basis(&plp, &[0, 2]).unwrap();
        assert_eq!(a.optimal, OptimalFunction::new(vec![int(2)], int(0)));
        assert!(a.is_degenerate());
        assert_eq!(a.optimal.eval(&[frac(1, 2)]).unwrap(), int(1));
        let trivial = analyze_basis(&plp, &[2, 4]).unwrap();
        assert!(trivial.optimal.is_constant());
        // λ3 alone cannot balance the x2 row with λ1 nonbasic and λ0 at 1.
        assert!(analyze_basis(&plp, &[0, 1]).is_err());
    }
}
