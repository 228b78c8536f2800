//! Dense two-phase tableau simplex shared by the float and rational solvers.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::types::Rational;

pub(crate) trait LpNum: Clone + PartialOrd + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_exact_zero(&self) -> bool;
    fn abs(&self) -> Self;
    /// Snaps numerical noise to zero after a pivot.
    fn cleaned(self) -> Self {
        self
    }
}

impl LpNum for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn cleaned(self) -> Self {
        if self.abs() < 1e-12 {
            0.0
        } else {
            self
        }
    }
}

impl LpNum for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_exact_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PivotRule {
    /// Smallest improving index; smallest basic index among ratio ties.
    Bland,
    /// Most negative reduced cost; smallest index among ratio ties.
    Dantzig,
}

#[derive(Clone, Debug)]
pub(crate) struct Tolerances<T> {
    /// Minimum magnitude of an admissible pivot element.
    pub pivot: T,
    /// Reduced costs below `-cost` improve the objective.
    pub cost: T,
    /// Phase-1 optimum above this value means infeasible.
    pub feasibility: T,
}

impl Tolerances<Rational> {
    pub fn exact() -> Self {
        Self {
            pivot: Zero::zero(),
            cost: Zero::zero(),
            feasibility: Zero::zero(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Settings<T> {
    pub rule: PivotRule,
    pub tol: Tolerances<T>,
    pub max_iterations: Option<usize>,
    /// Stop phase 2 after this many pivots and report the basis as optimal.
    pub phase2_cutoff: Option<usize>,
}

#[derive(Clone, Debug)]
pub(crate) enum TableauOutcome<T> {
    Optimal {
        /// Basic column for each surviving constraint row.
        basis: Vec<usize>,
        values: Vec<T>,
    },
    Infeasible,
    Unbounded,
    IterationLimit,
}

struct Tableau<T> {
    /// m rows of width `width + 1`; the last entry is the right-hand side.
    rows: Vec<Vec<T>>,
    /// Reduced costs, last entry is minus the objective value.
    cost: Vec<T>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: LpNum> Tableau<T> {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = T::one().div(&self.rows[r][c]);
        for v in self.rows[r].iter_mut() {
            if !v.is_exact_zero() {
                *v = v.mul(&inv).cleaned();
            }
        }
        self.rows[r][c] = T::one();
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row, &pivot_row, c);
            }
        }
        eliminate(&mut self.cost, &pivot_row, c);
        self.basis[r] = c;
    }

    fn set_cost(&mut self, c: &[T]) {
        let mut cost: Vec<T> = c.to_vec();
        cost.resize(self.width, T::zero());
        cost.push(T::zero());
        for (r, row) in self.rows.iter().enumerate() {
            let cb = &cost[self.basis[r]];
            if cb.is_exact_zero() {
                continue;
            }
            let cb = cb.clone();
            for (k, v) in row.iter().enumerate() {
                if !v.is_exact_zero() {
                    cost[k] = cost[k].sub(&cb.mul(v)).cleaned();
                }
            }
        }
        self.cost = cost;
    }

    fn entering(&self, allowed: usize, rule: PivotRule, tol: &T) -> Option<usize> {
        let neg_tol = tol.neg();
        let candidates = (0..allowed).filter(|&j| self.cost[j] < neg_tol);
        match rule {
            PivotRule::Bland => candidates.into_iter().next(),
            PivotRule::Dantzig => candidates.fold(None, |best: Option<usize>, j| match best {
                Some(b) if self.cost[b] <= self.cost[j] => Some(b),
                _ => Some(j),
            }),
        }
    }

    fn leaving(&self, c: usize, tol: &T) -> Option<usize> {
        let rhs = self.width;
        let mut best: Option<(usize, T)> = None;
        for (r, row) in self.rows.iter().enumerate() {
            if row[c] <= *tol {
                continue;
            }
            let ratio = row[rhs].div(&row[c]);
            best = match best {
                None => Some((r, ratio)),
                Some((b, br)) => {
                    let better = match ratio.partial_cmp(&br).unwrap_or(Ordering::Equal) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => self.basis[r] < self.basis[b],
                    };
                    if better {
                        Some((r, ratio))
                    } else {
                        Some((b, br))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }
}

fn eliminate<T: LpNum>(row: &mut [T], pivot_row: &[T], c: usize) {
    let f = row[c].clone();
    if f.is_exact_zero() {
        return;
    }
    for (v, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_exact_zero() {
            *v = v.sub(&f.mul(p)).cleaned();
        }
    }
    row[c] = T::zero();
}

enum Run {
    Optimal,
    Unbounded,
    Limit,
}

fn run<T: LpNum>(
    t: &mut Tableau<T>,
    allowed: usize,
    s: &Settings<T>,
    iterations: &mut usize,
    cutoff: Option<usize>,
) -> Run {
    let mut pivots = 0;
    loop {
        if cutoff.is_some_and(|k| pivots >= k) {
            return Run::Optimal;
        }
        if s.max_iterations.is_some_and(|k| *iterations >= k) {
            return Run::Limit;
        }
        let Some(c) = t.entering(allowed, s.rule, &s.tol.cost) else {
            return Run::Optimal;
        };
        let Some(r) = t.leaving(c, &s.tol.pivot) else {
            return Run::Unbounded;
        };
        t.pivot(r, c);
        *iterations += 1;
        pivots += 1;
    }
}

/// Minimizes `c·x` subject to `a·x = b`, `x ≥ 0`.
pub(crate) fn solve<T: LpNum>(a: &[Vec<T>], b: &[T], c: &[T], s: &Settings<T>) -> TableauOutcome<T> {
    let m = a.len();
    let n = c.len();
    let width = n + m;

    let mut rows = Vec::with_capacity(m);
    for (i, ai) in a.iter().enumerate() {
        debug_assert_eq!(ai.len(), n);
        let flip = b[i] < T::zero();
        let mut row: Vec<T> = ai.iter().map(|v| if flip { v.neg() } else { v.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { T::one() } else { T::zero() }));
        row.push(if flip { b[i].neg() } else { b[i].clone() });
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        cost: Vec::new(),
        basis: (n..n + m).collect(),
        width,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1 = vec![T::zero(); width];
    for v in phase1.iter_mut().skip(n) {
        *v = T::one();
    }
    t.set_cost(&phase1);
    let mut iterations = 0;
    match run(&mut t, width, s, &mut iterations, None) {
        Run::Limit => return TableauOutcome::IterationLimit,
        // Phase 1 is bounded below; this only happens through float noise.
        Run::Unbounded => return TableauOutcome::IterationLimit,
        Run::Optimal => {}
    }
    let infeasibility = t.cost[width].neg();
    if infeasibility > s.tol.feasibility {
        return TableauOutcome::Infeasible;
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] < n {
            r += 1;
            continue;
        }
        let entering = (0..n).find(|&j| t.rows[r][j].abs() > s.tol.pivot);
        match entering {
            Some(j) => {
                t.pivot(r, j);
                r += 1;
            }
            None => {
                t.rows.remove(r);
                t.basis.remove(r);
            }
        }
    }

    // Phase 2 over the structural columns only.
    for row in t.rows.iter_mut() {
        let rhs = row[width].clone();
        row.truncate(n);
        row.push(rhs);
    }
    t.width = n;
    t.set_cost(c);
    match run(&mut t, n, s, &mut iterations, s.phase2_cutoff) {
        Run::Limit => TableauOutcome::IterationLimit,
        Run::Unbounded => TableauOutcome::Unbounded,
        Run::Optimal => {
            let mut values = vec![T::zero(); n];
            for (row, &bv) in t.rows.iter().zip(&t.basis) {
                values[bv] = row[n].clone();
            }
            TableauOutcome::Optimal { basis: t.basis, values }
        }
    }
}
