//! Linear programming in canonical form: minimize `c·λ` subject to
//! `A·λ = b`, `λ ≥ 0`.
//!
//! [`float_simplex`] is the fast path. It only reports the final basis; the
//! exact values are recomputed from that basis by the caller.
//! [`rational_simplex`] is exact and uses Bland's rule.

mod farkas;
pub(crate) mod tableau;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::types::{to_f64, Rational};
use tableau::{LpNum, PivotRule, Settings, TableauOutcome, Tolerances};

pub use farkas::{farkas_combination, farkas_combination_hinted, FarkasCertificate};

/// Feasibility threshold of the float solver.
pub const DEFAULT_THRESHOLD: f64 = 1e-7;

/// Canonical-form LP.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem<T> {
    a: Vec<Vec<T>>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Clone> LpProblem<T> {
    pub fn new(a: Vec<Vec<T>>, b: Vec<T>, c: Vec<T>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        for row in &a {
            if row.len() != c.len() {
                return Err(Error::DimensionMismatch {
                    expected: c.len(),
                    found: row.len(),
                });
            }
        }
        Ok(Self { a, b, c })
    }

    pub fn num_rows(&self) -> usize {
        self.a.len()
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn matrix(&self) -> &[Vec<T>] {
        &self.a
    }

    pub fn rhs(&self) -> &[T] {
        &self.b
    }

    pub fn objective(&self) -> &[T] {
        &self.c
    }
}

impl LpProblem<Rational> {
    /// Nearest-float image of every entry.
    pub fn to_float(&self) -> Result<LpProblem<f64>> {
        let conv = |v: &[Rational]| v.iter().map(to_f64).collect::<Result<Vec<f64>>>();
        Ok(LpProblem {
            a: self.a.iter().map(|r| conv(r)).collect::<Result<_>>()?,
            b: conv(&self.b)?,
            c: conv(&self.c)?,
        })
    }
}

/// Partition of the variable indices into basic and nonbasic sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisPartition {
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
}

impl BasisPartition {
    /// `basic` keeps its order (one entry per pivoted row); the nonbasic set
    /// is the ascending complement in `0..num_vars`.
    pub fn new(basic: Vec<usize>, num_vars: usize) -> Self {
        let mut is_basic = vec![false; num_vars];
        for &j in &basic {
            is_basic[j] = true;
        }
        let nonbasic = (0..num_vars).filter(|&j| !is_basic[j]).collect();
        Self { basic, nonbasic }
    }

    pub fn basic(&self) -> &[usize] {
        &self.basic
    }

    pub fn nonbasic(&self) -> &[usize] {
        &self.nonbasic
    }

    pub fn num_vars(&self) -> usize {
        self.basic.len() + self.nonbasic.len()
    }

    /// Basic indices in ascending order; identifies the basis as a set.
    pub fn key(&self) -> Vec<usize> {
        let mut k = self.basic.clone();
        k.sort_unstable();
        k
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FloatOutcome {
    Optimal(BasisPartition),
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RationalOutcome {
    Optimal {
        basis: BasisPartition,
        values: Vec<Rational>,
    },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct FloatSimplexOptions {
    /// Phase-1 residual above which the problem is declared infeasible.
    pub feasibility_threshold: f64,
    /// `None` picks a limit from the problem size.
    pub max_iterations: Option<usize>,
    /// Stop phase 2 after this many pivots. Used to inject premature
    /// optimality in tests.
    pub phase2_cutoff: Option<usize>,
}

impl Default for FloatSimplexOptions {
    fn default() -> Self {
        Self {
            feasibility_threshold: DEFAULT_THRESHOLD,
            max_iterations: None,
            phase2_cutoff: None,
        }
    }
}

impl FloatSimplexOptions {
    pub fn with_threshold(t: f64) -> Self {
        Self {
            feasibility_threshold: t,
            ..Self::default()
        }
    }
}

fn iteration_limit(rows: usize, vars: usize) -> usize {
    1000 + 50 * (rows + vars)
}

fn float_settings(opts: &FloatSimplexOptions, rows: usize, vars: usize) -> Settings<f64> {
    Settings {
        rule: PivotRule::Dantzig,
        tol: Tolerances {
            pivot: 1e-9,
            cost: 1e-9,
            feasibility: opts.feasibility_threshold,
        },
        max_iterations: Some(opts.max_iterations.unwrap_or(iteration_limit(rows, vars))),
        phase2_cutoff: opts.phase2_cutoff,
    }
}

fn rational_settings() -> Settings<Rational> {
    Settings {
        rule: PivotRule::Bland,
        tol: Tolerances::exact(),
        max_iterations: None,
        phase2_cutoff: None,
    }
}

/// Dantzig-rule two-phase simplex in binary64. Only the final partition is
/// returned; it may be wrong and must be checked by the caller.
pub fn float_simplex(p: &LpProblem<f64>, opts: &FloatSimplexOptions) -> Result<FloatOutcome> {
    for v in p.a.iter().flatten().chain(&p.b).chain(&p.c) {
        if !v.is_finite() {
            return Err(Error::NonFinite(*v));
        }
    }
    let s = float_settings(opts, p.num_rows(), p.num_vars());
    match tableau::solve(&p.a, &p.b, &p.c, &s) {
        TableauOutcome::Optimal { basis, .. } => Ok(FloatOutcome::Optimal(BasisPartition::new(basis, p.num_vars()))),
        TableauOutcome::Infeasible => Ok(FloatOutcome::Infeasible),
        TableauOutcome::Unbounded => Ok(FloatOutcome::Unbounded),
        TableauOutcome::IterationLimit => Err(Error::IterationLimit),
    }
}

/// Exact two-phase simplex with Bland's rule.
pub fn rational_simplex(p: &LpProblem<Rational>) -> RationalOutcome {
    match tableau::solve(&p.a, &p.b, &p.c, &rational_settings()) {
        TableauOutcome::Optimal { basis, values } => RationalOutcome::Optimal {
            basis: BasisPartition::new(basis, p.num_vars()),
            values,
        },
        TableauOutcome::Infeasible => RationalOutcome::Infeasible,
        TableauOutcome::Unbounded => RationalOutcome::Unbounded,
        TableauOutcome::IterationLimit => unreachable!("no iteration limit in exact mode"),
    }
}

/// Row `coeffs · x + constant` of an inequality-form LP.
pub(crate) type AffineRow<T> = (Vec<T>, T);

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum IneqOutcome<T> {
    Optimal(Vec<T>),
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Maximizes `objective · x` over free `x` subject to `row(x) ≥ 0` for every
/// inequality and `row(x) = 0` for every equality.
pub(crate) fn ineq_lp<T: LpNum>(
    dim: usize,
    ineq: &[AffineRow<T>],
    eq: &[AffineRow<T>],
    objective: &[T],
    settings: &Settings<T>,
) -> IneqOutcome<T> {
    // Variables: x⁺ (dim), x⁻ (dim), one slack per inequality.
    let n = 2 * dim + ineq.len();
    let mut a = Vec::with_capacity(ineq.len() + eq.len());
    let mut b = Vec::with_capacity(ineq.len() + eq.len());
    for (k, (coeffs, constant)) in ineq.iter().chain(eq).enumerate() {
        let mut row = vec![T::zero(); n];
        for (j, v) in coeffs.iter().enumerate() {
            row[j] = v.clone();
            row[dim + j] = v.neg();
        }
        if k < ineq.len() {
            row[2 * dim + k] = T::one().neg();
        }
        a.push(row);
        b.push(constant.neg());
    }
    let mut c = vec![T::zero(); n];
    for (j, v) in objective.iter().enumerate() {
        c[j] = v.neg();
        c[dim + j] = v.clone();
    }
    match tableau::solve(&a, &b, &c, settings) {
        TableauOutcome::Optimal { values, .. } => {
            IneqOutcome::Optimal((0..dim).map(|j| values[j].sub(&values[dim + j])).collect())
        }
        TableauOutcome::Infeasible => IneqOutcome::Infeasible,
        TableauOutcome::Unbounded => IneqOutcome::Unbounded,
        TableauOutcome::IterationLimit => IneqOutcome::IterationLimit,
    }
}

pub(crate) fn ineq_lp_f64(
    dim: usize,
    ineq: &[AffineRow<f64>],
    eq: &[AffineRow<f64>],
    objective: &[f64],
    t: f64,
) -> IneqOutcome<f64> {
    let rows = ineq.len() + eq.len();
    let s = float_settings(&FloatSimplexOptions::with_threshold(t), rows, 2 * dim + ineq.len());
    ineq_lp(dim, ineq, eq, objective, &s)
}

pub(crate) fn ineq_lp_exact(
    dim: usize,
    ineq: &[AffineRow<Rational>],
    eq: &[AffineRow<Rational>],
    objective: &[Rational],
) -> IneqOutcome<Rational> {
    ineq_lp(dim, ineq, eq, objective, &rational_settings())
}

/// Exact objective value `c·λ`.
pub fn objective_value(c: &[Rational], values: &[Rational]) -> Rational {
    crate::types::dot(c, values)
}

/// `A·λ = b` and `λ ≥ 0`, checked exactly.
pub fn is_feasible_point(p: &LpProblem<Rational>, values: &[Rational]) -> bool {
    values.len() == p.num_vars()
        && values.iter().all(|v| !v.is_negative())
        && p.a
            .iter()
            .zip(&p.b)
            .all(|(row, bi)| (crate::types::dot(row, values) - bi).is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{frac, int};
    use proptest::prelude::*;

    fn rat_lp(a: &[&[i64]], b: &[i64], c: &[i64]) -> LpProblem<Rational> {
        LpProblem::new(
            a.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            b.iter().map(|&v| int(v)).collect(),
            c.iter().map(|&v| int(v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn float_single_equality() {
        let p = rat_lp(&[&[1]], &[1], &[1]).to_float().unwrap();
        let out = float_simplex(&p, &FloatSimplexOptions::default()).unwrap();
        assert_eq!(out, FloatOutcome::Optimal(BasisPartition::new(vec![0], 1)));
    }

    #[test]
    fn float_detects_unbounded_ray() {
        let p = rat_lp(&[&[1, -1]], &[0], &[-1, 0]).to_float().unwrap();
        let out = float_simplex(&p, &FloatSimplexOptions::default()).unwrap();
        assert_eq!(out, FloatOutcome::Unbounded);
    }

    #[test]
    fn rational_rejects_negative_total() {
        // λ1 + λ2 = -10⁻⁸ has no nonnegative solution.
        let p = LpProblem::new(
            vec![vec![int(1), int(1)]],
            vec![frac(-1, 100_000_000)],
            vec![int(0), int(0)],
        )
        .unwrap();
        assert_eq!(rational_simplex(&p), RationalOutcome::Infeasible);
    }

    #[test]
    fn float_threshold_hides_tiny_infeasibility() {
        let p = LpProblem::new(vec![vec![1.0, 1.0]], vec![-1e-8], vec![0.0, 0.0]).unwrap();
        let out = float_simplex(&p, &FloatSimplexOptions::default()).unwrap();
        assert!(matches!(out, FloatOutcome::Optimal(_)));
    }

    #[test]
    fn rational_fixed_value() {
        let p = rat_lp(&[&[1]], &[3], &[0]);
        match rational_simplex(&p) {
            RationalOutcome::Optimal { values, .. } => assert_eq!(values, vec![int(3)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn partition_complements() {
        let b = BasisPartition::new(vec![3, 1], 5);
        assert_eq!(b.nonbasic(), &[0, 2, 4]);
        assert_eq!(b.key(), vec![1, 3]);
    }

    #[test]
    fn ineq_lp_finds_vertex() {
        // max x2 s.t. x1 - x2 >= 0, 7 - x1 - x2 >= 0.
        let rows = vec![(vec![1.0, -1.0], 0.0), (vec![-1.0, -1.0], 7.0)];
        let out = ineq_lp_f64(2, &rows, &[], &[0.0, 1.0], DEFAULT_THRESHOLD);
        assert_eq!(out, IneqOutcome::Optimal(vec![3.5, 3.5]));
    }

    /// Objective value at every feasible basic solution, by brute force.
    fn vertex_values(p: &LpProblem<Rational>) -> Vec<Rational> {
        use crate::matrix::{solve_columns, RationalMatrix};
        let m = p.num_rows();
        let n = p.num_vars();
        let mut out = Vec::new();
        let mut subset: Vec<usize> = (0..m).collect();
        loop {
            let cols = RationalMatrix::from_rows(
                p.a.iter()
                    .map(|r| subset.iter().map(|&j| r[j].clone()).collect())
                    .collect(),
            );
            let rhs = RationalMatrix::from_rows(p.b.iter().map(|v| vec![v.clone()]).collect());
            if let Ok(x) = solve_columns(&cols, &rhs) {
                let mut full = vec![<Rational as Zero>::zero(); n];
                for (k, &j) in subset.iter().enumerate() {
                    full[j] = x[(k, 0)].clone();
                }
                if full.iter().all(|v| !v.is_negative()) {
                    out.push(objective_value(&p.c, &full));
                }
            }
            // Next combination.
            let mut i = m;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if subset[i] < n - m + i {
                    subset[i] += 1;
                    for k in i + 1..m {
                        subset[k] = subset[k - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn arb_lp() -> impl Strategy<Value = LpProblem<Rational>> {
        (2usize..=3, 4usize..=6).prop_flat_map(|(m, n)| {
            (
                proptest::collection::vec(proptest::collection::vec(-5i64..=5, n), m),
                proptest::collection::vec(0i64..=6, n),
                proptest::collection::vec(-5i64..=5, n),
            )
                .prop_map(move |(a, x, c)| {
                    // b = A·x for a nonnegative x keeps the system feasible.
                    let b: Vec<i64> = a.iter().map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
                    let rows: Vec<&[i64]> = a.iter().map(|r| r.as_slice()).collect();
                    rat_lp(&rows, &b, &c)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn rational_optimum_is_feasible_and_minimal(p in arb_lp()) {
            match rational_simplex(&p) {
                RationalOutcome::Optimal { values, .. } => {
                    prop_assert!(is_feasible_point(&p, &values));
                    let z = objective_value(&p.c, &values);
                    for v in vertex_values(&p) {
                        prop_assert!(z <= v);
                    }
                }
                RationalOutcome::Unbounded => {}
                RationalOutcome::Infeasible => prop_assert!(false, "constructed feasible"),
            }
        }

        #[test]
        fn float_agrees_on_feasibility(p in arb_lp()) {
            let exact = rational_simplex(&p);
            let float = float_simplex(&p.to_float().unwrap(), &FloatSimplexOptions::default()).unwrap();
            prop_assert_eq!(
                matches!(exact, RationalOutcome::Infeasible),
                matches!(float, FloatOutcome::Infeasible)
            );
        }
    }
}
