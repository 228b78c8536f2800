//! Worklist solver for the parametric LP.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checkers::{verify_feasible_basis, AdjacencyTable, BasisCheck};
use crate::degeneracy::{lex_simplex, BasisList, PerturbationMatrix};
use crate::error::{Error, Result};
use crate::format::write_polyhedron;
use crate::lp::{
    float_simplex, ineq_lp_exact, ineq_lp_f64, rational_simplex, AffineRow, FloatOutcome, FloatSimplexOptions,
    IneqOutcome, LpProblem, RationalOutcome, DEFAULT_THRESHOLD,
};
use crate::matrix::RationalMatrix;
use crate::minimize::{farkas_minimize, minimize_exact};
use crate::types::{point_from_f64, point_to_f64, to_f64, FloatPoint, Point, Polyhedron, Rational};

use super::problem::{construct_hull, construct_projection, PlpProblem};
use super::region::{analyze_basis, BasisAnalysis, OptimalFunction, Region};

/// Deliberate corruption of float simplex answers, for testing the exact
/// fallbacks.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FaultInjection {
    /// Probability of swapping a basic column for a random nonbasic one.
    pub wrong_basis: f64,
    /// Probability of stopping phase 2 after at most two pivots.
    pub premature_optimality: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub threshold: f64,
    /// Random initial tasks besides the fixed point `(1, …, 1)`.
    pub initial_points: usize,
    pub seed: u64,
    pub faults: FaultInjection,
    /// Perturbed retries for a task point lying on a region boundary.
    pub max_jitter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            initial_points: 1,
            seed: 0,
            faults: FaultInjection::default(),
            max_jitter: 8,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub tasks: usize,
    pub covered_tasks: usize,
    pub float_solves: usize,
    /// Float answers rejected by the feasibility check.
    pub float_rejected: usize,
    pub exact_solves: usize,
    pub lex_simplex_runs: usize,
    pub injected_faults: usize,
    pub jitters: usize,
    pub extra_points: usize,
    pub degenerate_groups: usize,
    pub sweep_rounds: usize,
    pub sweep_tasks: usize,
}

#[derive(Clone, Debug)]
struct Task {
    /// Point in shifted coordinates `y = x - p`.
    y: FloatPoint,
    from: Option<(usize, usize)>,
    attempts: usize,
}

/// Regions sharing one optimal function, explored under one perturbation.
#[derive(Clone, Debug)]
struct Group {
    optimal: OptimalFunction,
    anchor: Vec<usize>,
    bases: BasisList,
    regions: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PlpSolution {
    plp: PlpProblem,
    opts: SolveOptions,
    regions: BTreeMap<usize, Region>,
    groups: Vec<Group>,
    table: AdjacencyTable,
    next_id: usize,
    worklist: VecDeque<Task>,
    rng: ChaCha8Rng,
    fault_rng: ChaCha8Rng,
    stats: SolveStats,
}

/// Hard stop for the worklist, far above anything desk-scale instances need.
const MAX_TASKS: usize = 200_000;
const SWEEP_ROUNDS: usize = 48;
const SWEEP_STEP: f64 = 0.05;

impl PlpSolution {
    fn new(plp: PlpProblem, opts: SolveOptions) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let fault_rng = ChaCha8Rng::seed_from_u64(opts.faults.seed);
        Self {
            plp,
            opts,
            regions: BTreeMap::new(),
            groups: Vec::new(),
            table: AdjacencyTable::new(),
            next_id: 0,
            worklist: VecDeque::new(),
            rng,
            fault_rng,
            stats: SolveStats::default(),
        }
    }

    pub fn problem(&self) -> &PlpProblem {
        &self.plp
    }

    pub fn regions(&self) -> impl Iterator<Item = &Region> {
        self.regions.values()
    }

    pub fn region(&self, id: usize) -> Option<&Region> {
        self.regions.get(&id)
    }

    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn table(&self) -> &AdjacencyTable {
        &self.table
    }

    pub fn stats(&self) -> &SolveStats {
        &self.stats
    }

    /// Distinct optimal functions owning at least one full-dimensional
    /// region, including the constant one.
    pub fn optimal_functions(&self) -> Vec<&OptimalFunction> {
        self.groups
            .iter()
            .filter(|g| !g.regions.is_empty())
            .map(|g| &g.optimal)
            .collect()
    }

    /// The result: every nonconstant optimal function as a constraint
    /// `Z*(x) ≥ 0`, minimized.
    pub fn polyhedron(&self) -> Result<Polyhedron> {
        let rows = self
            .optimal_functions()
            .into_iter()
            .filter(|z| !z.is_constant())
            .map(|z| z.as_constraint().clone())
            .collect();
        let p = Polyhedron::new(self.plp.param_dim(), rows)?;
        let kept = match minimize_exact(&p, self.opts.threshold)? {
            Some(m) => m.kept,
            None => farkas_minimize(&p),
        };
        Ok(p.select(&kept).normalized())
    }

    /// Every region over the original parameters, one text block each.
    pub fn dump_regions(&self) -> String {
        let apex = self.plp.normalization_point();
        let mut out = String::new();
        for r in self.regions.values() {
            let basis: Vec<String> = r
                .basis
                .key()
                .iter()
                .map(|&j| self.plp.column_name(j).to_string())
                .collect();
            out.push_str(&format!(
                "# region {} group {} basis {}\n",
                r.id,
                r.group,
                basis.join(",")
            ));
            out.push_str(&format!("# optimal: {}\n", r.optimal.as_constraint()));
            out.push_str(&write_polyhedron(&r.in_parameters(apex)));
        }
        out
    }

    /// Drops a region as if it had never been found.
    pub fn remove_region(&mut self, id: usize) -> Option<Region> {
        let r = self.regions.remove(&id)?;
        self.table.remove_region(id);
        let g = &mut self.groups[r.group];
        g.regions.retain(|&k| k != id);
        g.bases.forget(r.basis.basic());
        Some(r)
    }

    fn seed_tasks(&mut self) -> Result<()> {
        let d = self.plp.param_dim();
        let mut points = vec![vec![1.0; d]];
        for _ in 0..self.opts.initial_points {
            points.push((0..d).map(|_| self.rng.gen_range(-50i32..=50) as f64).collect());
        }
        for x in points {
            let y = self.plp.to_shifted(&x)?;
            self.worklist.push_back(Task {
                y,
                from: None,
                attempts: 0,
            });
        }
        Ok(())
    }

    fn run_worklist(&mut self) -> Result<()> {
        while let Some(task) = self.worklist.pop_front() {
            self.stats.tasks += 1;
            if self.stats.tasks > MAX_TASKS {
                return Err(Error::IterationLimit);
            }
            self.process(task)?;
        }
        Ok(())
    }

    fn covering(&self, y: &[f64], exact: &[Rational]) -> Option<usize> {
        if exact.iter().all(Zero::is_zero) {
            return self.regions.keys().next().copied();
        }
        self.regions
            .values()
            .find(|r| r.may_contain(y) && r.contains_strictly(exact))
            .map(|r| r.id)
    }

    fn process(&mut self, task: Task) -> Result<()> {
        let exact = point_from_f64(&task.y)?;
        if let Some(r) = self.covering(&task.y, &exact) {
            self.stats.covered_tasks += 1;
            if let Some(from) = task.from {
                self.try_link(from, r);
            }
            return Ok(());
        }
        if let Some(basic) = self.float_solve(&task.y)? {
            self.integrate(&basic, Some(&exact))?;
        }
        let mut current = self.covering(&task.y, &exact);
        if current.is_none() {
            let basic = self.exact_solve(&exact)?;
            self.integrate(&basic, Some(&exact))?;
            current = self.covering(&task.y, &exact);
        }
        match (current, task.from) {
            (None, _) => {
                // On a boundary between regions: retry nearby.
                if task.attempts < self.opts.max_jitter {
                    self.stats.jitters += 1;
                    let scale = 1e-3 * (1.0 + task.y.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                    let y = task
                        .y
                        .iter()
                        .map(|v| v + scale * self.rng.gen_range(-1.0..=1.0))
                        .collect();
                    self.worklist.push_back(Task {
                        y,
                        from: task.from,
                        attempts: task.attempts + 1,
                    });
                }
            }
            (Some(r), Some(from)) => {
                if !self.try_link(from, r) {
                    if let Some(prev) = self.regions.get(&from.0) {
                        self.stats.extra_points += 1;
                        let y = add_extra_point(&self.regions[&r], prev);
                        self.worklist.push_back(Task {
                            y,
                            from: None,
                            attempts: 0,
                        });
                    }
                }
            }
            (Some(_), None) => {}
        }
        Ok(())
    }

    fn try_link(&mut self, from: (usize, usize), to: usize) -> bool {
        let Some(row) = self
            .regions
            .get(&from.0)
            .and_then(|r| r.frontiers.get(from.1))
            .map(|f| f.row.clone())
        else {
            return false;
        };
        match self.regions[&to].opposite_frontier(&row) {
            Some(g) => {
                self.table.link(from, (to, g));
                true
            }
            None => false,
        }
    }

    /// Float basis at `y` that passes the exact feasibility check.
    fn float_solve(&mut self, y: &[f64]) -> Result<Option<Vec<usize>>> {
        self.stats.float_solves += 1;
        let lp = self.plp.float_lp(y)?;
        let mut opts = FloatSimplexOptions::with_threshold(self.opts.threshold);
        let faults = self.opts.faults.clone();
        if faults.premature_optimality > 0.0 && self.fault_rng.gen_bool(faults.premature_optimality) {
            self.stats.injected_faults += 1;
            opts.phase2_cutoff = Some(self.fault_rng.gen_range(0..3));
        }
        let mut basic = match float_simplex(&lp, &opts) {
            Ok(FloatOutcome::Optimal(b)) => b.basic().to_vec(),
            _ => {
                self.stats.float_rejected += 1;
                return Ok(None);
            }
        };
        if faults.wrong_basis > 0.0 && self.fault_rng.gen_bool(faults.wrong_basis) && !basic.is_empty() {
            self.stats.injected_faults += 1;
            let n = self.plp.num_vars();
            let r = self.fault_rng.gen_range(0..basic.len());
            let j = self.fault_rng.gen_range(0..n);
            if let Some(pos) = basic.iter().position(|&b| b == j) {
                basic.swap(r, pos);
                let a = self.fault_rng.gen_range(0..n);
                basic[r] = a;
            } else {
                basic[r] = j;
            }
        }
        if basic.len() != self.plp.num_rows() {
            self.stats.float_rejected += 1;
            return Ok(None);
        }
        if self.is_known(&basic) {
            return Ok(Some(basic));
        }
        match verify_feasible_basis(self.plp.m(), &basic) {
            BasisCheck::Verified(_) => Ok(Some(basic)),
            _ => {
                self.stats.float_rejected += 1;
                Ok(None)
            }
        }
    }

    fn exact_solve(&mut self, y: &[Rational]) -> Result<Vec<usize>> {
        self.stats.exact_solves += 1;
        match rational_simplex(&self.plp.exact_lp(y)?) {
            RationalOutcome::Optimal { basis, .. } if basis.basic().len() == self.plp.num_rows() => {
                Ok(basis.basic().to_vec())
            }
            other => Err(Error::Consistency(format!("exact solve at a task point: {other:?}"))),
        }
    }

    fn is_known(&self, basic: &[usize]) -> bool {
        self.groups.iter().any(|g| g.bases.contains(basic))
    }

    fn group_of(&self, z: &OptimalFunction) -> Option<usize> {
        self.groups.iter().position(|g| &g.optimal == z)
    }

    /// Adds the regions of an optimal basis. A new optimal function starts a
    /// group anchored at `basic`; a known one only grows through
    /// lexicographic pivots from its anchor, so regions never overlap.
    fn integrate(&mut self, basic: &[usize], y: Option<&Point>) -> Result<()> {
        if self.is_known(basic) {
            return Ok(());
        }
        let analysis = analyze_basis(&self.plp, basic)?;
        match self.group_of(&analysis.optimal) {
            None => {
                if analysis.is_degenerate() {
                    self.stats.degenerate_groups += 1;
                }
                self.groups.push(Group {
                    optimal: analysis.optimal.clone(),
                    anchor: basic.to_vec(),
                    bases: BasisList::new(PerturbationMatrix::for_anchor(self.plp.m(), basic)),
                    regions: Vec::new(),
                });
                self.explore(self.groups.len() - 1, basic)
            }
            Some(g) => {
                if self.groups[g].bases.contains(basic) {
                    return Ok(());
                }
                let Some(y) = y else { return Ok(()) };
                self.stats.lex_simplex_runs += 1;
                let c = self.plp.objective_exact(y);
                let group = &self.groups[g];
                let found = lex_simplex(self.plp.m(), group.bases.perturbation(), &group.anchor, &c)?;
                let other: BasisAnalysis = analyze_basis(&self.plp, &found)?;
                if other.optimal == self.groups[g].optimal {
                    self.explore(g, &found)
                } else if self.group_of(&other.optimal).is_none() {
                    self.integrate(&found, None)
                } else {
                    Ok(())
                }
            }
        }
    }

    fn explore(&mut self, g: usize, start: &[usize]) -> Result<()> {
        let mut found = Vec::new();
        let t = self.opts.threshold;
        self.groups[g].bases.explore(&self.plp, start, t, |r| {
            found.push(r);
            Ok(())
        })?;
        for r in found {
            self.add_region(g, r);
        }
        Ok(())
    }

    fn add_region(&mut self, g: usize, mut region: Region) {
        let duplicate = self.groups[g]
            .regions
            .iter()
            .any(|id| self.regions[id].cone.rows() == region.cone.rows());
        if duplicate {
            return;
        }
        let id = self.next_id;
        self.next_id += 1;
        region.id = id;
        region.group = g;
        self.table.register(id, region.frontiers.len());
        for (k, f) in region.frontiers.iter().enumerate() {
            if let Ok(y) = point_to_f64(&f.witness) {
                self.worklist.push_back(Task {
                    y,
                    from: Some((id, k)),
                    attempts: 0,
                });
            }
        }
        self.groups[g].regions.push(id);
        self.regions.insert(id, region);
    }

    /// A point beyond frontier `key`, at distance `step` from a relative
    /// interior point of the facet.
    fn crossing_point(&self, key: (usize, usize), step: f64) -> Result<FloatPoint> {
        let region = &self.regions[&key.0];
        let d = self.plp.param_dim();
        let facet = &region.frontiers[key.1].row;
        let center = facet_center(region, key.1, d)?;
        let a: Vec<f64> = facet.coeffs().iter().map(to_f64).collect::<Result<_>>()?;
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        Ok(center.iter().zip(&a).map(|(c, v)| c - step * v / norm).collect())
    }
}

/// Relative interior point of facet `k` of a region, inside the unit box.
fn facet_center(region: &Region, k: usize, d: usize) -> Result<FloatPoint> {
    let rows = region.cone.float_mirror().rows();
    let unit = |i: usize| -> Vec<f64> {
        let n = rows[i].norm();
        rows[i].coeffs.iter().map(|v| v / n).collect()
    };
    let mut ineq: Vec<AffineRow<f64>> = (0..rows.len())
        .filter(|&i| i != k)
        .map(|i| {
            let mut c = unit(i);
            c.push(-1.0);
            (c, 0.0)
        })
        .collect();
    for j in 0..d {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; d + 1];
            c[j] = -sign;
            ineq.push((c, 1.0));
        }
    }
    let mut cap = vec![0.0; d + 1];
    cap[d] = -1.0;
    ineq.push((cap, 1.0));
    let mut on_facet = unit(k);
    on_facet.push(0.0);
    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;
    if let IneqOutcome::Optimal(mut y) = ineq_lp_f64(d + 1, &ineq, &[(on_facet, 0.0)], &objective, DEFAULT_THRESHOLD) {
        if y.pop().is_some_and(|s| s > 1e-9) {
            return Ok(y);
        }
    }
    // Exact fallback on the unnormalized rows.
    let cone = &region.cone;
    let one = Rational::one();
    let mut ineq: Vec<AffineRow<Rational>> = (0..cone.len())
        .filter(|&i| i != k)
        .map(|i| {
            let mut c = cone.row(i).coeffs().to_vec();
            c.push(-one.clone());
            (c, Rational::zero())
        })
        .collect();
    let mut cap = vec![Rational::zero(); d + 1];
    cap[d] = -one.clone();
    ineq.push((cap, one.clone()));
    let mut on_facet = cone.row(k).coeffs().to_vec();
    on_facet.push(Rational::zero());
    let mut objective = vec![Rational::zero(); d + 1];
    objective[d] = one;
    match ineq_lp_exact(d + 1, &ineq, &[(on_facet, Rational::zero())], &objective) {
        IneqOutcome::Optimal(mut y) => {
            y.pop();
            let scale = y
                .iter()
                .map(|v| to_f64(v).map(f64::abs))
                .try_fold(1.0f64, |m, v| v.map(|v| m.max(v)))?;
            Ok(point_to_f64(&y)?.into_iter().map(|v| v / scale).collect())
        }
        _ => Err(Error::Consistency(format!(
            "facet {k} of region {} is empty",
            region.id
        ))),
    }
}

/// Midpoint of the representative interior points of two regions.
pub fn add_extra_point(r1: &Region, r2: &Region) -> FloatPoint {
    r1.interior
        .iter()
        .zip(&r2.interior)
        .map(|(a, b)| (to_f64(a).unwrap_or(0.0) + to_f64(b).unwrap_or(0.0)) / 2.0)
        .collect()
}

/// Region whose interior contains the parameter point `x`.
pub fn check_covered(solution: &PlpSolution, x: &[f64]) -> Option<usize> {
    let y = solution.plp.to_shifted(x).ok()?;
    let exact = point_from_f64(&y).ok()?;
    solution.covering(&y, &exact)
}

/// Crosses every frontier whose adjacency flag is still false and solves
/// just beyond it until the table is complete. Returns the ids of the
/// regions found on the way.
pub fn adjacency_sweep(solution: &mut PlpSolution) -> Result<Vec<usize>> {
    let before: BTreeSet<usize> = solution.regions.keys().copied().collect();
    let mut steps: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut rounds = 0;
    loop {
        let missing = solution.table.missing();
        if missing.is_empty() {
            break;
        }
        rounds += 1;
        solution.stats.sweep_rounds += 1;
        if rounds > SWEEP_ROUNDS {
            return Err(Error::Consistency(format!(
                "{} frontiers still lack a neighbor after {SWEEP_ROUNDS} sweep rounds",
                missing.len()
            )));
        }
        for key in missing {
            if solution.table.flag(key) || !solution.regions.contains_key(&key.0) {
                continue;
            }
            let step = steps.entry(key).or_insert(SWEEP_STEP);
            let q = solution.crossing_point(key, *step)?;
            *step /= 2.0;
            solution.stats.sweep_tasks += 1;
            solution.worklist.push_back(Task {
                y: q,
                from: Some(key),
                attempts: 0,
            });
            solution.run_worklist()?;
        }
    }
    Ok(solution
        .regions
        .keys()
        .copied()
        .filter(|id| !before.contains(id))
        .collect())
}

/// Runs the worklist from the initial tasks, then the adjacency sweep.
pub fn solve(plp: &PlpProblem, opts: &SolveOptions) -> Result<PlpSolution> {
    let mut sol = PlpSolution::new(plp.clone(), opts.clone());
    sol.seed_tasks()?;
    sol.run_worklist()?;
    adjacency_sweep(&mut sol)?;
    Ok(sol)
}

/// Projection of `poly` onto the coordinates not in `eliminate` (0-based).
pub fn project(poly: &Polyhedron, eliminate: &[usize], opts: &SolveOptions) -> Result<PlpSolution> {
    solve(&construct_projection(poly, eliminate)?, opts)
}

/// Closed convex hull of two polyhedra.
pub fn hull(p1: &Polyhedron, p2: &Polyhedron, opts: &SolveOptions) -> Result<PlpSolution> {
    solve(&construct_hull(p1, p2)?, opts)
}

/// Interiors of two cones in shifted coordinates intersect. They are
/// disjoint exactly when a nonzero `λ ≥ 0` combines all rows to zero; a
/// float basis for that system is verified exactly before the rational
/// simplex is run.
pub fn interiors_intersect(a: &Polyhedron, b: &Polyhedron) -> bool {
    let rows: Vec<&[Rational]> = a.rows().iter().chain(b.rows()).map(|r| r.coeffs()).collect();
    if rows.is_empty() {
        return true;
    }
    let d = a.dim();
    let mut eqs: Vec<Vec<Rational>> = (0..d).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    eqs.push(vec![Rational::one(); rows.len()]);
    let mut rhs = vec![Rational::zero(); d];
    rhs.push(Rational::one());
    let float_rows: Option<Vec<Vec<f64>>> = eqs.iter().map(|r| r.iter().map(|v| to_f64(v).ok()).collect()).collect();
    if let Some(float_rows) = float_rows {
        let float_rhs: Vec<f64> = rhs.iter().map(|v| if v.is_zero() { 0.0 } else { 1.0 }).collect();
        if let Ok(lp) = LpProblem::new(float_rows, float_rhs, vec![0.0; rows.len()]) {
            if let Ok(FloatOutcome::Optimal(basis)) = float_simplex(&lp, &FloatSimplexOptions::default()) {
                let m = RationalMatrix::from_rows(
                    eqs.iter()
                        .zip(&rhs)
                        .map(|(r, v)| r.iter().chain([v]).cloned().collect())
                        .collect(),
                );
                if matches!(verify_feasible_basis(&m, basis.basic()), BasisCheck::Verified(_)) {
                    return false;
                }
            }
        }
    }
    match LpProblem::new(eqs, rhs, vec![Rational::zero(); rows.len()]) {
        Ok(lp) => matches!(rational_simplex(&lp), RationalOutcome::Infeasible),
        Err(_) => true,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub regions_checked: usize,
    pub discrepancies: Vec<String>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Recomputes every region from its basis in exact arithmetic and checks
/// the adjacency table and, for up to `overlap_limit` regions, pairwise
/// interior disjointness.
pub fn audit(solution: &PlpSolution, overlap_limit: usize) -> Result<AuditReport> {
    let plp = &solution.plp;
    let apex = plp.normalization_point();
    let mut report = AuditReport::default();
    for r in solution.regions.values() {
        report.regions_checked += 1;
        let analysis = analyze_basis(plp, r.basis.basic())?;
        if analysis.optimal != r.optimal {
            report
                .discrepancies
                .push(format!("region {}: optimal function differs", r.id));
        }
        if analysis.values != r.values {
            report
                .discrepancies
                .push(format!("region {}: basic values differ", r.id));
        }
        if r.optimal.eval(apex)? != Rational::one() {
            report.discrepancies.push(format!("region {}: Z*(p) != 1", r.id));
        }
        match super::region::build_region(&analysis, solution.opts.threshold)? {
            Some(rebuilt) if rebuilt.cone.rows() == r.cone.rows() => {}
            Some(_) => report.discrepancies.push(format!("region {}: cone differs", r.id)),
            None => report
                .discrepancies
                .push(format!("region {}: flat on recomputation", r.id)),
        }
        if !r.cone.contains_strictly(&r.interior)? {
            report
                .discrepancies
                .push(format!("region {}: interior point is not interior", r.id));
        }
    }
    if !solution.table.is_complete() {
        report
            .discrepancies
            .push(format!("{} frontiers lack a neighbor", solution.table.missing().len()));
    }
    if !solution.table.is_symmetric() {
        report.discrepancies.push("adjacency table is not symmetric".into());
    }
    if solution.regions.len() <= overlap_limit {
        let list: Vec<&Region> = solution.regions.values().collect();
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                if interiors_intersect(&a.cone, &b.cone) {
                    report
                        .discrepancies
                        .push(format!("regions {} and {} overlap", a.id, b.id));
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{frac, int};

    fn square() -> Polyhedron {
        Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1]]).unwrap()
    }

    #[test]
    fn cone_overlaps() {
        let quadrant = Polyhedron::from_ints(2, &[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        let upper = Polyhedron::from_ints(2, &[&[0, 1, 0]]).unwrap();
        let lower = Polyhedron::from_ints(2, &[&[0, -1, 0]]).unwrap();
        let diagonal = Polyhedron::from_ints(2, &[&[1, -1, 0], &[-1, 1, 0]]).unwrap();
        assert!(interiors_intersect(&quadrant, &upper));
        assert!(!interiors_intersect(&quadrant, &lower));
        assert!(!interiors_intersect(&upper, &lower));
        assert!(!interiors_intersect(&diagonal, &Polyhedron::universe(2)));
        assert!(interiors_intersect(&Polyhedron::universe(0), &Polyhedron::universe(0)));
    }

    #[test]
    fn square_projects_to_interval() {
        let sol = project(&square(), &[1], &SolveOptions::default()).unwrap();
        let p = sol.polyhedron().unwrap();
        assert_eq!(p.len(), 2);
        for (x, inside) in [
            (frac(0, 1), true),
            (int(1), true),
            (frac(-1, 100), false),
            (frac(101, 100), false),
        ] {
            assert_eq!(p.contains(&[x]).unwrap(), inside);
        }
        assert!(sol.table().is_complete());
        assert!(audit(&sol, 40).unwrap().is_clean());
    }

    #[test]
    fn every_optimal_function_is_one_at_the_apex() {
        let p = Polyhedron::from_ints(2, &[&[-1, 2, -2], &[2, -1, -1], &[-1, -1, 8], &[2, 4, -7]]).unwrap();
        let sol = project(&p, &[1], &SolveOptions::default()).unwrap();
        let apex = sol.problem().normalization_point().clone();
        for z in sol.optimal_functions() {
            assert_eq!(z.eval(&apex).unwrap(), int(1));
        }
        // Pairing C1 with C2 and C1 with C3 gives 4/3 ≤ x1 ≤ 14/3.
        let out = sol.polyhedron().unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.contains(&[frac(4, 3)]).unwrap() && out.contains(&[frac(14, 3)]).unwrap());
        assert!(!out.contains(&[frac(133, 100)]).unwrap() && !out.contains(&[frac(467, 100)]).unwrap());
    }

    #[test]
    fn eliminating_everything_leaves_the_constant() {
        let sol = project(&square(), &[0, 1], &SolveOptions::default()).unwrap();
        assert_eq!(sol.polyhedron().unwrap().len(), 0);
        assert_eq!(sol.num_regions(), 1);
    }

    #[test]
    fn one_dimensional_hull() {
        let a = Polyhedron::from_ints(1, &[&[1, 0], &[-1, 1]]).unwrap();
        let b = Polyhedron::from_ints(1, &[&[1, -2], &[-1, 3]]).unwrap();
        let sol = hull(&a, &b, &SolveOptions::default()).unwrap();
        let out = sol.polyhedron().unwrap();
        assert_eq!(out.len(), 2);
        assert!(out.contains(&[int(0)]).unwrap() && out.contains(&[int(3)]).unwrap());
        assert!(!out.contains(&[int(-1)]).unwrap() && !out.contains(&[int(4)]).unwrap());
    }

    #[test]
    fn deleted_region_is_recovered() {
        let p = Polyhedron::from_ints(
            3,
            &[
                &[1, 0, 1, 0],
                &[-1, 0, 1, 2],
                &[0, 1, 1, 0],
                &[0, -1, 1, 2],
                &[0, 0, -1, 3],
            ],
        )
        .unwrap();
        let mut sol = project(&p, &[2], &SolveOptions::default()).unwrap();
        let expected = sol.polyhedron().unwrap();
        let victim = sol.regions().find(|r| !r.optimal.is_constant()).unwrap().clone();
        sol.remove_region(victim.id);
        assert!(!sol.table().is_complete());
        let recovered = adjacency_sweep(&mut sol).unwrap();
        assert!(!recovered.is_empty());
        assert!(recovered
            .iter()
            .any(|id| sol.region(*id).unwrap().optimal == victim.optimal));
        assert_eq!(sol.polyhedron().unwrap(), expected);
    }
}
