//! Primal degeneracy: lexicographic perturbation and enumeration of every
//! basis of a degenerate optimum without overlapping regions.

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use num_traits::{Signed, Zero};

use crate::checkers::{verify_feasible_basis, BasisCheck};
use crate::error::{Error, Result};
use crate::matrix::{solve_columns, RationalMatrix};
use crate::plp::problem::PlpProblem;
use crate::plp::region::{analyze_basis, build_region, Region};
use crate::types::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Degeneracy {
    NonDegenerate,
    /// Basic columns whose value is exactly zero.
    Degenerate(Vec<usize>),
}

pub fn detect_degenerate(m: &RationalMatrix, basic: &[usize]) -> Result<Degeneracy> {
    match verify_feasible_basis(m, basic) {
        BasisCheck::Verified(values) => {
            let zero: Vec<usize> = basic.iter().copied().filter(|&j| values[j].is_zero()).collect();
            Ok(if zero.is_empty() {
                Degeneracy::NonDegenerate
            } else {
                Degeneracy::Degenerate(zero)
            })
        }
        other => Err(Error::Consistency(format!("basis {basic:?}: {other:?}"))),
    }
}

/// Lexicographic order: the first differing entry decides.
pub fn lex_compare(v1: &[Rational], v2: &[Rational]) -> Ordering {
    debug_assert_eq!(v1.len(), v2.len());
    for (a, b) in v1.iter().zip(v2) {
        match a.cmp(b) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn lex_positive(v: &[Rational]) -> bool {
    v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_positive)
}

/// Columns `P` added to the right-hand side as `rhs + P·(ε, ε², …)`.
///
/// Taking `P = M_B` for an anchor basis `B` makes the perturbation an
/// identity block in the anchor's tableau.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerturbationMatrix {
    matrix: RationalMatrix,
}

impl PerturbationMatrix {
    pub fn identity(k: usize) -> Self {
        Self {
            matrix: RationalMatrix::identity(k),
        }
    }

    pub fn for_anchor(m: &RationalMatrix, basic: &[usize]) -> Self {
        Self {
            matrix: m.select_columns(basic),
        }
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.matrix
    }
}

/// Tableau `M_B⁻¹ [M | rhs | P]` for one basis.
#[derive(Clone, Debug)]
pub struct LexTableau {
    basic: Vec<usize>,
    t: RationalMatrix,
    vars: usize,
}

impl LexTableau {
    /// `m` carries the right-hand side as its last column.
    pub fn new(m: &RationalMatrix, perturbation: &PerturbationMatrix, basic: &[usize]) -> Result<Self> {
        let k = m.rows();
        let vars = m.cols() - 1;
        let p = perturbation.matrix();
        let mut wide = RationalMatrix::zeros(k, m.cols() + p.cols());
        for r in 0..k {
            for c in 0..m.cols() {
                wide[(r, c)] = m[(r, c)].clone();
            }
            for c in 0..p.cols() {
                wide[(r, m.cols() + c)] = p[(r, c)].clone();
            }
        }
        let t = solve_columns(&m.select_columns(basic), &wide)?;
        Ok(Self {
            basic: basic.to_vec(),
            t,
            vars,
        })
    }

    pub fn basic(&self) -> &[usize] {
        &self.basic
    }

    /// Right-hand side entry followed by the perturbation entries of row `r`.
    pub fn lex_vector(&self, r: usize) -> &[Rational] {
        &self.t.row(r)[self.vars..]
    }

    pub fn value(&self, r: usize) -> &Rational {
        &self.t[(r, self.vars)]
    }

    pub fn entry(&self, r: usize, j: usize) -> &Rational {
        &self.t[(r, j)]
    }

    pub fn is_lex_feasible(&self) -> bool {
        (0..self.t.rows()).all(|r| lex_positive(self.lex_vector(r)))
    }

    /// Row minimizing `v_r / a_rj` lexicographically over rows with
    /// `a_rj > 0`. `None` when column `j` is unbounded.
    pub fn leaving_row(&self, j: usize) -> Option<usize> {
        let mut best: Option<(usize, Vec<Rational>)> = None;
        for r in 0..self.t.rows() {
            let a = &self.t[(r, j)];
            if !a.is_positive() {
                continue;
            }
            let ratio: Vec<Rational> = self.lex_vector(r).iter().map(|v| v / a).collect();
            if best
                .as_ref()
                .is_none_or(|(_, b)| lex_compare(&ratio, b) == Ordering::Less)
            {
                best = Some((r, ratio));
            }
        }
        best.map(|(r, _)| r)
    }

    pub fn pivot(&mut self, r: usize, j: usize) {
        let inv = self.t[(r, j)].recip();
        let width = self.t.cols();
        for c in 0..width {
            let v = &self.t[(r, c)] * &inv;
            self.t[(r, c)] = v;
        }
        for i in 0..self.t.rows() {
            if i == r || self.t[(i, j)].is_zero() {
                continue;
            }
            let f = self.t[(i, j)].clone();
            for c in 0..width {
                let v = &self.t[(r, c)] * &f;
                self.t[(i, c)] -= v;
            }
        }
        self.basic[r] = j;
    }

    /// Reduced cost of every column for objective `c`.
    pub fn reduced_costs(&self, c: &[Rational]) -> Vec<Rational> {
        (0..self.vars)
            .map(|j| {
                self.basic
                    .iter()
                    .enumerate()
                    .fold(c[j].clone(), |acc, (r, &b)| acc - &c[b] * &self.t[(r, j)])
            })
            .collect()
    }
}

/// Simplex from a lexicographically feasible basis with Bland entering and
/// lexicographic leaving; returns the optimal basis for objective `c`.
pub fn lex_simplex(
    m: &RationalMatrix,
    perturbation: &PerturbationMatrix,
    start: &[usize],
    c: &[Rational],
) -> Result<Vec<usize>> {
    let mut tab = LexTableau::new(m, perturbation, start)?;
    loop {
        let d = tab.reduced_costs(c);
        let Some(j) = (0..d.len()).find(|&j| d[j].is_negative() && !tab.basic.contains(&j)) else {
            return Ok(tab.basic);
        };
        let r = tab
            .leaving_row(j)
            .ok_or_else(|| Error::Consistency("parametric LP is unbounded".into()))?;
        tab.pivot(r, j);
    }
}

/// Bases already visited for one optimum, with the perturbation they share.
#[derive(Clone, Debug)]
pub struct BasisList {
    perturbation: PerturbationMatrix,
    explored: BTreeSet<Vec<usize>>,
}

/// Upper bound on bases explored for a single optimum.
pub const MAX_BASES: usize = 20_000;

impl BasisList {
    pub fn new(perturbation: PerturbationMatrix) -> Self {
        Self {
            perturbation,
            explored: BTreeSet::new(),
        }
    }

    pub fn perturbation(&self) -> &PerturbationMatrix {
        &self.perturbation
    }

    pub fn contains(&self, basic: &[usize]) -> bool {
        self.explored.contains(&sorted(basic))
    }

    /// Marks a basis as unexplored again.
    pub fn forget(&mut self, basic: &[usize]) {
        self.explored.remove(&sorted(basic));
    }

    pub fn len(&self) -> usize {
        self.explored.len()
    }

    pub fn is_empty(&self) -> bool {
        self.explored.is_empty()
    }

    /// Breadth-first search from `start` over lexicographic pivots that keep
    /// the vertex. Full-dimensional regions are passed to `emit`. Regions
    /// expand through their frontiers; flat ones through every column.
    pub fn explore(
        &mut self,
        plp: &PlpProblem,
        start: &[usize],
        t: f64,
        mut emit: impl FnMut(Region) -> Result<()>,
    ) -> Result<()> {
        let mut queue = VecDeque::from([start.to_vec()]);
        while let Some(basic) = queue.pop_front() {
            if !self.explored.insert(sorted(&basic)) {
                continue;
            }
            if self.explored.len() > MAX_BASES {
                return Err(Error::IterationLimit);
            }
            let tab = LexTableau::new(plp.m(), &self.perturbation, &basic)?;
            if !tab.is_lex_feasible() {
                return Err(Error::Consistency(format!(
                    "basis {basic:?} is not lexicographically feasible"
                )));
            }
            let analysis = analyze_basis(plp, &basic)?;
            let region = build_region(&analysis, t)?;
            let entering: Vec<usize> = match &region {
                Some(r) => r.frontiers.iter().flat_map(|f| f.columns.iter().copied()).collect(),
                None => analysis.basis.nonbasic().to_vec(),
            };
            if let Some(r) = region {
                emit(r)?;
            }
            if !analysis.is_degenerate() {
                continue;
            }
            for j in entering {
                let Some(r) = tab.leaving_row(j) else { continue };
                if !tab.value(r).is_zero() {
                    // Crossing leads to another optimum.
                    continue;
                }
                let mut next = tab.clone();
                next.pivot(r, j);
                if !self.contains(next.basic()) {
                    queue.push_back(next.basic);
                }
            }
        }
        Ok(())
    }
}

fn sorted(basic: &[usize]) -> Vec<usize> {
    let mut k = basic.to_vec();
    k.sort_unstable();
    k
}

/// Every full-dimensional region of the optimum at `basic`, pairwise
/// interior-disjoint. A nondegenerate basis yields its own region only.
pub fn explore_degeneracy(plp: &PlpProblem, basic: &[usize], t: f64) -> Result<Vec<Region>> {
    let mut list = BasisList::new(PerturbationMatrix::for_anchor(plp.m(), basic));
    let mut regions: Vec<Region> = Vec::new();
    list.explore(plp, basic, t, |r| {
        if !regions.iter().any(|q| q.cone.rows() == r.cone.rows()) {
            regions.push(r);
        }
        Ok(())
    })?;
    Ok(regions)
}
