//! Exact checks that back the floating-point fast paths.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::lp::{ineq_lp_exact, IneqOutcome};
use crate::matrix::{row_reduce, RationalMatrix};
use crate::minimize::farkas_minimize;
use crate::types::{from_f64, Polyhedron, Rational, Relation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BasisCheck {
    /// Exact basic solution, one value per variable.
    Verified(Vec<Rational>),
    Infeasible,
    NotABasis,
}

/// Reduces `m` (constraint columns followed by the right-hand side) on the
/// `basic` columns and checks that the basic solution is nonnegative and
/// consistent.
pub fn verify_feasible_basis(m: &RationalMatrix, basic: &[usize]) -> BasisCheck {
    let vars = m.cols().saturating_sub(1);
    if basic.iter().any(|&j| j >= vars) {
        return BasisCheck::NotABasis;
    }
    // Only the basic columns and the right-hand side take part.
    let mut cols = basic.to_vec();
    cols.push(vars);
    let sub = m.select_columns(&cols);
    let pivot_cols: Vec<usize> = (0..basic.len()).collect();
    let Ok((reduced, pivots)) = row_reduce(&sub, &pivot_cols) else {
        return BasisCheck::NotABasis;
    };
    if pivots.iter().any(Option::is_none) {
        return BasisCheck::NotABasis;
    }
    let rank = basic.len();
    let rhs = rank;
    let mut values = vec![Rational::zero(); vars];
    for (&j, pivot) in basic.iter().zip(&pivots) {
        let r = pivot.expect("checked above");
        let v = reduced[(r, rhs)].clone();
        if v.is_negative() {
            return BasisCheck::Infeasible;
        }
        values[j] = v;
    }
    // Rows left after the pivots hold only nonbasic columns, which sit at 0.
    for r in rank..m.rows() {
        if !reduced[(r, rhs)].is_zero() {
            return BasisCheck::Infeasible;
        }
    }
    BasisCheck::Verified(values)
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlatCheck {
    Flat,
    /// Not flat; carries the exactly minimized polyhedron.
    NonFlat(Polyhedron),
}

/// Shift applied to cone rows when testing for an interior.
pub const CONE_SHIFT: i64 = 1;

/// Decides in exact arithmetic whether `r` has an empty interior.
///
/// Cones are shifted inward by [`CONE_SHIFT`] and tested for feasibility;
/// other polyhedra maximize the smallest slack.
pub fn flat_region_check(r: &Polyhedron) -> Result<FlatCheck> {
    if r.is_trivially_unsatisfiable() {
        return Ok(FlatCheck::Flat);
    }
    if !has_interior(r) {
        return Ok(FlatCheck::Flat);
    }
    let kept = farkas_minimize(r);
    Ok(FlatCheck::NonFlat(r.select(&kept)))
}

pub(crate) fn has_interior(r: &Polyhedron) -> bool {
    let dim = r.dim();
    if r.is_empty() {
        return true;
    }
    if r.is_cone() {
        let shift = Rational::from_integer(CONE_SHIFT.into());
        let rows: Vec<_> = r.rows().iter().map(|c| (c.coeffs().to_vec(), -shift.clone())).collect();
        let zero = vec![Rational::zero(); dim];
        return matches!(
            ineq_lp_exact(dim, &rows, &[], &zero),
            IneqOutcome::Optimal(_) | IneqOutcome::Unbounded
        );
    }
    // Variables (x, s): maximize s with every row ≥ s and s ≤ 1.
    let mut rows: Vec<_> = r
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
        IneqOutcome::Optimal(x) => x[dim].is_positive(),
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessCheck {
    Confirmed,
    Rejected,
}

/// Exact test of a float witness: row `i` must evaluate to at most `-t`
/// and every other row must hold.
pub fn verify_witness(p: &Polyhedron, i: usize, w: &[f64], t: f64) -> WitnessCheck {
    let (Ok(pt), Ok(t)) = (crate::types::point_from_f64(w), from_f64(t)) else {
        return WitnessCheck::Rejected;
    };
    verify_witness_exact(p, i, &pt, &t)
}

pub(crate) fn verify_witness_exact(p: &Polyhedron, i: usize, pt: &[Rational], t: &Rational) -> WitnessCheck {
    if pt.len() != p.dim() || i >= p.len() {
        return WitnessCheck::Rejected;
    }
    for (j, c) in p.rows().iter().enumerate() {
        let v = c.eval(pt).expect("dimension checked");
        let ok = if j == i {
            v <= -t.clone()
        } else {
            match c.relation() {
                Relation::NonStrict => !v.is_negative(),
                Relation::Strict => v.is_positive(),
            }
        };
        if !ok {
            return WitnessCheck::Rejected;
        }
    }
    WitnessCheck::Confirmed
}

/// Region/frontier pairs and the frontiers found on the other side of them.
/// Links are always stored in both directions.
#[derive(Clone, Debug, Default)]
pub struct AdjacencyTable {
    entries: BTreeMap<(usize, usize), BTreeSet<(usize, usize)>>,
}

impl AdjacencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds unflagged entries for frontiers `0..frontiers` of `region`.
    pub fn register(&mut self, region: usize, frontiers: usize) {
        for f in 0..frontiers {
            self.entries.entry((region, f)).or_default();
        }
    }

    pub fn link(&mut self, a: (usize, usize), b: (usize, usize)) {
        self.entries.entry(a).or_default().insert(b);
        self.entries.entry(b).or_default().insert(a);
    }

    pub fn flag(&self, key: (usize, usize)) -> bool {
        self.entries.get(&key).is_some_and(|n| !n.is_empty())
    }

    pub fn neighbors(&self, key: (usize, usize)) -> impl Iterator<Item = &(usize, usize)> {
        self.entries.get(&key).into_iter().flatten()
    }

    /// Entries whose flag is still false.
    pub fn missing(&self) -> Vec<(usize, usize)> {
        self.entries
            .iter()
            .filter(|(_, n)| n.is_empty())
            .map(|(k, _)| *k)
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.entries.values().all(|n| !n.is_empty())
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries.iter().all(|(k, ns)| {
            ns.iter()
                .all(|n| self.entries.get(n).is_some_and(|back| back.contains(k)))
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Drops a region and every link pointing at it.
    pub fn remove_region(&mut self, region: usize) {
        self.entries.retain(|k, _| k.0 != region);
        for ns in self.entries.values_mut() {
            ns.retain(|n| n.0 != region);
        }
    }
}

pub use crate::plp::solver::adjacency_sweep;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{frac, int, Constraint};

    #[test]
    fn verified_basis_values() {
        // λ1 + λ2 = 2, λ1 - λ2 = 0.
        let m = RationalMatrix::from_i64(&[&[1, 1, 2], &[1, -1, 0]]);
        assert_eq!(
            verify_feasible_basis(&m, &[0, 1]),
            BasisCheck::Verified(vec![int(1), int(1)])
        );
    }

    #[test]
    fn negative_basic_value_is_infeasible() {
        let m = RationalMatrix::from_rows(vec![vec![int(1), int(1), frac(-1, 1_000_000_000)]]);
        assert_eq!(verify_feasible_basis(&m, &[0]), BasisCheck::Infeasible);
    }

    #[test]
    fn duplicate_columns_are_not_a_basis() {
        let m = RationalMatrix::from_i64(&[&[1, 1, 1], &[2, 2, 0]]);
        assert_eq!(verify_feasible_basis(&m, &[0, 1]), BasisCheck::NotABasis);
        assert_eq!(verify_feasible_basis(&m, &[0, 0]), BasisCheck::NotABasis);
    }

    #[test]
    fn inconsistent_zero_row_is_infeasible() {
        let m = RationalMatrix::from_i64(&[&[1, 0, 1], &[2, 0, 3]]);
        assert_eq!(verify_feasible_basis(&m, &[0]), BasisCheck::Infeasible);
    }

    #[test]
    fn thin_cone_is_not_flat() {
        // -(100000001/10000000) x1 + x2 <= 0 and 10 x1 - x2 <= 0.
        let r = Polyhedron::new(
            2,
            vec![
                Constraint::new(vec![frac(100_000_001, 10_000_000), int(-1)], int(0)),
                Constraint::new(vec![int(-10), int(1)], int(0)),
            ],
        )
        .unwrap();
        match flat_region_check(&r).unwrap() {
            FlatCheck::NonFlat(m) => assert_eq!(m.len(), 2),
            FlatCheck::Flat => panic!("cone has an interior"),
        }
    }

    #[test]
    fn slab_of_width_zero_is_flat() {
        let r = Polyhedron::from_ints(2, &[&[-1, 0, 0], &[1, 0, 0]]).unwrap();
        assert_eq!(flat_region_check(&r).unwrap(), FlatCheck::Flat);
    }

    #[test]
    fn non_cone_interior() {
        let square = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1]]).unwrap();
        assert!(matches!(flat_region_check(&square).unwrap(), FlatCheck::NonFlat(_)));
        let segment = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 0]]).unwrap();
        assert_eq!(flat_region_check(&segment).unwrap(), FlatCheck::Flat);
    }

    fn witness_example() -> Polyhedron {
        // -x1 + x2 <= 0, x1 + x2 <= 7, and 2 x2 <= 3 whose violation is -2 x2 < -3.
        Polyhedron::from_ints(2, &[&[1, -1, 0], &[-1, -1, 7], &[0, -2, 3]]).unwrap()
    }

    #[test]
    fn witness_confirmation() {
        let p = witness_example();
        assert_eq!(verify_witness(&p, 2, &[3.5, 3.5], 1e-7), WitnessCheck::Confirmed);
        assert_eq!(verify_witness(&p, 2, &[1.5, 1.5], 1e-7), WitnessCheck::Rejected);
        assert_eq!(verify_witness(&p, 2, &[1.5, 1.5 + 5e-10], 1e-7), WitnessCheck::Rejected);
        assert_eq!(verify_witness(&p, 2, &[0.0, 3.5], 1e-7), WitnessCheck::Rejected);
    }

    #[test]
    fn table_links_both_ways() {
        let mut t = AdjacencyTable::new();
        t.register(0, 2);
        t.register(1, 1);
        assert_eq!(t.missing().len(), 3);
        t.link((0, 1), (1, 0));
        assert!(t.flag((0, 1)) && t.flag((1, 0)));
        assert!(!t.is_complete());
        assert!(t.is_symmetric());
        t.remove_region(1);
        assert!(!t.flag((0, 1)));
    }
}
