//! Redundancy removal by ray tracing in floating point, with exact
//! confirmation when a rational form is available.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::checkers::{flat_region_check, verify_witness_exact, FlatCheck, WitnessCheck};
use crate::error::{Error, Result};
use crate::lp::{farkas_combination, farkas_combination_hinted, ineq_lp_exact, ineq_lp_f64, AffineRow, IneqOutcome};
use crate::types::{from_f64, point_from_f64, FloatPoint, FloatPolyhedron, Point, Polyhedron, Rational};

/// Half-width of the box that bounds searches inside cones.
const CONE_BOX: f64 = 1000.0;
/// Depth of the shifted row in cone witness searches.
const CONE_SHIFT: f64 = 1.0;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MinimizationResult {
    pub irredundant: Vec<usize>,
    /// Point violating only the keyed row, for every irredundant row.
    pub witnesses: BTreeMap<usize, FloatPoint>,
    /// Rows the float computation could not decide; treated as redundant.
    pub uncertain: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum WitnessSearch {
    Witness(FloatPoint),
    NotFound,
    Undetermined,
}

fn unit_rows(p: &FloatPolyhedron) -> Result<Vec<AffineRow<f64>>> {
    p.rows()
        .iter()
        .map(|r| {
            let n = r.norm();
            if n == 0.0 {
                return Err(Error::NoInterior);
            }
            Ok((r.coeffs.iter().map(|a| a / n).collect(), r.constant / n))
        })
        .collect()
}

fn box_rows(dim: usize, extra: usize, half_width: f64) -> Vec<AffineRow<f64>> {
    let mut rows = Vec::with_capacity(2 * dim);
    for k in 0..dim {
        for sign in [1.0, -1.0] {
            let mut coeffs = vec![0.0; dim + extra];
            coeffs[k] = -sign;
            rows.push((coeffs, half_width));
        }
    }
    rows
}

/// Maximizes the smallest normalized slack. Cones are searched inside the
/// unit box; the slack is capped at 1.
pub fn interior_point(p: &FloatPolyhedron, t: f64) -> Result<FloatPoint> {
    let dim = p.dim();
    if p.is_empty() {
        return Ok(vec![0.0; dim]);
    }
    let units = unit_rows(p)?;
    let cone = p.is_cone();
    let mut rows: Vec<AffineRow<f64>> = units
        .iter()
        .map(|(a, b)| {
            let mut coeffs = a.clone();
            coeffs.push(-1.0);
            (coeffs, if cone { 0.0 } else { *b })
        })
        .collect();
    if cone {
        rows.extend(box_rows(dim, 1, 1.0));
    }
    let mut cap = vec![0.0; dim];
    cap.push(-1.0);
    rows.push((cap, 1.0));
    let mut objective = vec![0.0; dim];
    objective.push(1.0);
    match ineq_lp_f64(dim + 1, &rows, &[], &objective, t) {
        IneqOutcome::Optimal(mut x) => {
            let s = x.pop().expect("slack variable");
            if s > t && p.rows().iter().all(|r| r.eval(&x) > 0.0) {
                Ok(x)
            } else {
                Err(Error::NoInterior)
            }
        }
        _ => Err(Error::NoInterior),
    }
}

/// Finds a point violating row `i` by more than `t` while satisfying every
/// other row. Non-cones maximize the violation; cones fix it and stay as far
/// from the other rows as possible.
pub fn witness_point(p: &FloatPolyhedron, i: usize, t: f64) -> WitnessSearch {
    let active = vec![true; p.len()];
    witness_among(p, i, &active, None, t)
}

fn witness_among(p: &FloatPolyhedron, i: usize, active: &[bool], x0: Option<&[f64]>, t: f64) -> WitnessSearch {
    let dim = p.dim();
    let rows = p.rows();
    let others: Vec<usize> = (0..p.len()).filter(|&j| j != i && active[j]).collect();
    let found = |x: FloatPoint| {
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let violated = rows[i].eval(&x) < -t;
        let others_hold = others
            .iter()
            .all(|&j| rows[j].eval(&x) >= -1e-9 * scale * (1.0 + rows[j].norm()));
        if violated && others_hold {
            WitnessSearch::Witness(x)
        } else {
            WitnessSearch::Undetermined
        }
    };
    if p.is_cone() {
        let Ok(units) = unit_rows(p) else {
            return WitnessSearch::Undetermined;
        };
        let mut ineq: Vec<AffineRow<f64>> = others
            .iter()
            .map(|&j| {
                let mut coeffs = units[j].0.clone();
                coeffs.push(-1.0);
                (coeffs, 0.0)
            })
            .collect();
        ineq.extend(box_rows(dim, 1, CONE_BOX));
        let mut cap = vec![0.0; dim];
        cap.push(-1.0);
        ineq.push((cap, 1.0));
        let mut shifted = units[i].0.clone();
        shifted.push(0.0);
        let eq = [(shifted, CONE_SHIFT)];
        let mut objective = vec![0.0; dim];
        objective.push(1.0);
        return match ineq_lp_f64(dim + 1, &ineq, &eq, &objective, t) {
            IneqOutcome::Optimal(mut x) => {
                let s = x.pop().expect("slack variable");
                if s > t {
                    found(x)
                } else if s < -t {
                    WitnessSearch::NotFound
                } else {
                    WitnessSearch::Undetermined
                }
            }
            IneqOutcome::Infeasible => WitnessSearch::NotFound,
            _ => WitnessSearch::Undetermined,
        };
    }

    let mut ineq: Vec<AffineRow<f64>> = others
        .iter()
        .map(|&j| (rows[j].coeffs.clone(), rows[j].constant))
        .collect();
    let negated = (rows[i].coeffs.iter().map(|a| -a).collect::<Vec<_>>(), -rows[i].constant);
    ineq.push(negated.clone());
    let objective = negated.0.clone();
    let outcome = match ineq_lp_f64(dim, &ineq, &[], &objective, t) {
        IneqOutcome::Unbounded => {
            // Cap the violation at 1.
            ineq.push((rows[i].coeffs.clone(), rows[i].constant + 1.0));
            ineq_lp_f64(dim, &ineq, &[], &objective, t)
        }
        other => other,
    };
    match outcome {
        IneqOutcome::Optimal(x) => {
            let violation = -rows[i].eval(&x);
            if violation > t {
                // The optimum is a vertex where other rows are tight; move
                // towards the interior so they hold strictly.
                if let Some(x0) = x0 {
                    for eps in [1e-6, 1e-4, 1e-2] {
                        let w: FloatPoint = x.iter().zip(x0).map(|(a, b)| a + eps * (b - a)).collect();
                        let strict = others.iter().all(|&j| rows[j].eval(&w) > 0.0);
                        if strict && rows[i].eval(&w) < -t {
                            return WitnessSearch::Witness(w);
                        }
                    }
                }
                found(x)
            } else if violation <= 1e-12 * (1.0 + rows[i].norm()) {
                WitnessSearch::NotFound
            } else {
                WitnessSearch::Undetermined
            }
        }
        IneqOutcome::Infeasible => WitnessSearch::NotFound,
        _ => WitnessSearch::Undetermined,
    }
}

/// Two-phase ray-tracing minimization in floating point.
///
/// Phase 1 shoots one ray from an interior point towards each row and keeps
/// the rows hit first. Phase 2 looks for a witness for each remaining row,
/// in ascending order, ignoring rows already found redundant.
pub fn ray_trace_minimize(p: &FloatPolyhedron, t: f64) -> Result<MinimizationResult> {
    let n = p.len();
    let mut result = MinimizationResult::default();
    if n == 0 {
        return Ok(result);
    }
    let x0 = interior_point(p, t)?;
    let units = unit_rows(p)?;
    let slack: Vec<f64> = units
        .iter()
        .map(|(a, b)| b + a.iter().zip(&x0).map(|(u, v)| u * v).sum::<f64>())
        .collect();

    let mut decided = vec![false; n];
    for (a_dir, _) in &units {
        // Ray x0 - s·a_dir, s ≥ 0.
        let mut hits: Vec<(f64, usize)> = units
            .iter()
            .enumerate()
            .filter_map(|(i, (a, _))| {
                let rate: f64 = a.iter().zip(a_dir).map(|(u, v)| u * v).sum();
                (rate > 1e-12).then(|| (slack[i] / rate, i))
            })
            .collect();
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        let Some(&(first, idx)) = hits.first() else {
            continue;
        };
        let tied = hits
            .get(1)
            .is_some_and(|&(second, _)| second - first <= t * (1.0 + first.abs()));
        if tied || decided[idx] {
            continue;
        }
        // A point just past the first hit violates only that row.
        let step = match hits.get(1) {
            Some(&(second, _)) => (first + second) / 2.0,
            None => first + 1.0 + first.abs(),
        };
        let w: FloatPoint = x0.iter().zip(a_dir).map(|(x, a)| x - step * a).collect();
        let holds = (0..n).all(|j| j == idx || p.rows()[j].eval(&w) >= 0.0);
        if p.rows()[idx].eval(&w) < -t && holds {
            decided[idx] = true;
            result.witnesses.insert(idx, w);
        }
    }

    let mut active = vec![true; n];
    for i in 0..n {
        if decided[i] {
            continue;
        }
        match witness_among(p, i, &active, Some(&x0), t) {
            WitnessSearch::Witness(w) => {
                decided[i] = true;
                result.witnesses.insert(i, w);
            }
            WitnessSearch::NotFound => active[i] = false,
            WitnessSearch::Undetermined => result.uncertain.push(i),
        }
    }
    result.irredundant = (0..n).filter(|&i| decided[i]).collect();
    Ok(result)
}

/// Pure exact minimization: each row in ascending order is dropped if the
/// rows still kept imply it.
pub fn farkas_minimize(p: &Polyhedron) -> Vec<usize> {
    let n = p.len();
    let mut active = vec![true; n];
    for i in 0..n {
        let others: Vec<_> = (0..n)
            .filter(|&j| j != i && active[j])
            .map(|j| p.row(j).clone())
            .collect();
        if farkas_combination(p.row(i), &others).is_some() {
            active[i] = false;
        }
    }
    (0..n).filter(|&i| active[i]).collect()
}

/// Exactly minimized row set with one exact witness per kept row.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMinimization {
    pub kept: Vec<usize>,
    pub witnesses: Vec<Point>,
    /// The float mirror looked flat and the rational check was needed.
    pub rescued: bool,
}

/// Float ray tracing confirmed in exact arithmetic: float witnesses are
/// re-checked, every other row is settled by a Farkas certificate or its
/// absence. Returns `None` when the polyhedron has an empty interior.
pub fn minimize_exact(p: &Polyhedron, t: f64) -> Result<Option<ExactMinimization>> {
    if p.is_trivially_unsatisfiable() {
        return Err(Error::EmptyPolyhedron);
    }
    let n = p.len();
    let fp = p.float_mirror();
    let float = match ray_trace_minimize(fp, t) {
        Ok(r) => Some(r),
        Err(Error::NoInterior) => None,
        Err(e) => return Err(e),
    };
    let Some(float) = float else {
        return match flat_region_check(p)? {
            FlatCheck::Flat => Ok(None),
            FlatCheck::NonFlat(_) => {
                let kept = farkas_minimize(p);
                let witnesses = exact_witnesses(p, &kept)?;
                Ok(Some(ExactMinimization {
                    kept,
                    witnesses,
                    rescued: true,
                }))
            }
        };
    };

    let t_exact = from_f64(t)?;
    let mut active = vec![true; n];
    let mut confirmed: BTreeMap<usize, Point> = BTreeMap::new();
    for i in 0..n {
        if let Some(w) = float.witnesses.get(&i) {
            let w = point_from_f64(w)?;
            if verify_witness_exact(p, i, &w, &t_exact) == WitnessCheck::Confirmed {
                confirmed.insert(i, w);
                continue;
            }
        }
        let others: Vec<_> = (0..n)
            .filter(|&j| j != i && active[j])
            .map(|j| p.row(j).clone())
            .collect();
        if farkas_combination_hinted(p.row(i), &others, t).is_some() {
            active[i] = false;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
    let missing: Vec<usize> = kept.iter().copied().filter(|i| !confirmed.contains_key(i)).collect();
    for &i in &missing {
        let others: Vec<usize> = kept.iter().copied().filter(|&j| j != i).collect();
        confirmed.insert(i, exact_witness(p, i, &others)?);
    }
    let witnesses = kept.iter().map(|i| confirmed[i].clone()).collect();
    Ok(Some(ExactMinimization {
        kept,
        witnesses,
        rescued: false,
    }))
}

/// Exact witness for each row of `kept`, computed against the kept rows only.
fn exact_witnesses(p: &Polyhedron, kept: &[usize]) -> Result<Vec<Point>> {
    kept.iter()
        .map(|&i| {
            let others: Vec<usize> = kept.iter().copied().filter(|&j| j != i).collect();
            exact_witness(p, i, &others)
        })
        .collect()
}

fn exact_witness(p: &Polyhedron, i: usize, others: &[usize]) -> Result<Point> {
    let dim = p.dim();
    let row = p.row(i);
    let one = Rational::one();
    let point = if p.is_cone() {
        // (y, s): others ≥ s, row_i = -1, s ≤ 1, |y| ≤ box.
        let mut ineq: Vec<AffineRow<Rational>> = others
            .iter()
            .map(|&j| {
                let mut coeffs = p.row(j).coeffs().to_vec();
                coeffs.push(-one.clone());
                (coeffs, Rational::zero())
            })
            .collect();
        let mut cap = vec![Rational::zero(); dim];
        cap.push(-one.clone());
        ineq.push((cap, one.clone()));
        let mut eq_row = row.coeffs().to_vec();
        eq_row.push(Rational::zero());
        let eq = [(eq_row, one.clone())];
        let mut objective = vec![Rational::zero(); dim];
        objective.push(one.clone());
        match ineq_lp_exact(dim + 1, &ineq, &eq, &objective) {
            IneqOutcome::Optimal(mut x) => {
                x.pop();
                x
            }
            _ => return Err(Error::Consistency(format!("no witness for kept row {i}"))),
        }
    } else {
        let mut ineq: Vec<AffineRow<Rational>> = others
            .iter()
            .map(|&j| (p.row(j).coeffs().to_vec(), p.row(j).constant().clone()))
            .collect();
        let negated: Vec<Rational> = row.coeffs().iter().map(|a| -a).collect();
        ineq.push((negated.clone(), -row.constant().clone()));
        ineq.push((row.coeffs().to_vec(), row.constant() + &one));
        match ineq_lp_exact(dim, &ineq, &[], &negated) {
            IneqOutcome::Optimal(x) => x,
            _ => return Err(Error::Consistency(format!("no witness for kept row {i}"))),
        }
    };
    if !row.eval(&point)?.is_negative() {
        return Err(Error::Consistency(format!("row {i} is redundant")));
    }
    Ok(point)
}

/// Minimized copy of `p`. Polyhedra with an empty interior fall back to the
/// pure Farkas minimizer.
pub fn minimize(p: &Polyhedron, t: f64) -> Result<Polyhedron> {
    match minimize_exact(p, t)? {
        Some(m) => Ok(p.select(&m.kept)),
        None => Ok(p.select(&farkas_minimize(p))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Constraint, Polyhedron};

    const T: f64 = 1e-7;

    fn example() -> Polyhedron {
        Polyhedron::from_ints(2, &[&[-1, 2, -2], &[2, -1, -1], &[-1, -1, 8], &[2, 4, -7]]).unwrap()
    }

    #[test]
    fn example_drops_c4() {
        let p = example();
        let r = ray_trace_minimize(p.float_mirror(), T).unwrap();
        assert_eq!(r.irredundant, vec![0, 1, 2]);
        for (i, w) in &r.witnesses {
            let rows = p.float_mirror().rows();
            assert!(rows[*i].eval(w) < -T);
            for (j, row) in rows.iter().enumerate() {
                if j != *i {
                    assert!(row.eval(w) >= 0.0);
                }
            }
        }
        let exact = minimize_exact(&p, T).unwrap().unwrap();
        assert_eq!(exact.kept, vec![0, 1, 2]);
    }

    #[test]
    fn interior_of_square_and_cone() {
        let square = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1]]).unwrap();
        let x = interior_point(square.float_mirror(), T).unwrap();
        assert!(square.float_mirror().rows().iter().all(|r| r.eval(&x) > T));
        let cone = Polyhedron::from_ints(2, &[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        let y = interior_point(cone.float_mirror(), T).unwrap();
        assert!(y.iter().all(|v| *v > T));
        let ex = example();
        let z = interior_point(ex.float_mirror(), T).unwrap();
        let exact = point_from_f64(&z).unwrap();
        assert!(ex.contains_strictly(&exact).unwrap());
    }

    #[test]
    fn single_row_is_kept() {
        let p = Polyhedron::from_ints(2, &[&[1, 1, 0]]).unwrap();
        let r = ray_trace_minimize(p.float_mirror(), T).unwrap();
        assert_eq!(r.irredundant, vec![0]);
    }

    #[test]
    fn duplicate_pair_keeps_one() {
        let p = Polyhedron::from_ints(2, &[&[1, 0, 0], &[1, 0, 0], &[0, 1, 0], &[-1, -1, 4]]).unwrap();
        let exact = minimize_exact(&p, T).unwrap().unwrap();
        assert_eq!(exact.kept.iter().filter(|&&i| i < 2).count(), 1);
        let dropped = if exact.kept.contains(&0) { 1 } else { 0 };
        let others: Vec<Constraint> = exact.kept.iter().map(|&i| p.row(i).clone()).collect();
        assert!(farkas_combination(p.row(dropped), &others).is_some());
    }

    #[test]
    fn optimization_witness_matches_example() {
        let p = Polyhedron::from_ints(2, &[&[1, -1, 0], &[-1, -1, 7], &[0, -2, 3]]).unwrap();
        assert_eq!(
            witness_point(p.float_mirror(), 2, T),
            WitnessSearch::Witness(vec![3.5, 3.5])
        );
    }

    #[test]
    fn redundant_row_has_no_witness() {
        let p = Polyhedron::from_ints(1, &[&[1, 0], &[1, 1]]).unwrap();
        assert_eq!(witness_point(p.float_mirror(), 1, T), WitnessSearch::NotFound);
    }

    #[test]
    fn cone_shift_agrees_with_farkas() {
        let cone = Polyhedron::from_ints(2, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[1, -3, 0]]).unwrap();
        for i in 0..cone.len() {
            let others: Vec<Constraint> = (0..cone.len())
                .filter(|&j| j != i)
                .map(|j| cone.row(j).clone())
                .collect();
            let implied = farkas_combination(cone.row(i), &others).is_some();
            match witness_point(cone.float_mirror(), i, T) {
                WitnessSearch::Witness(_) => assert!(!implied, "row {i}"),
                WitnessSearch::NotFound => assert!(implied, "row {i}"),
                WitnessSearch::Undetermined => panic!("row {i} undecided"),
            }
        }
    }

    #[test]
    fn flat_cone_is_rescued() {
        let p = Polyhedron::new(
            2,
            vec![
                Constraint::new(
                    vec![crate::types::frac(100_000_001, 10_000_000), crate::types::int(-1)],
                    crate::types::int(0),
                ),
                Constraint::new(vec![crate::types::int(-10), crate::types::int(1)], crate::types::int(0)),
            ],
        )
        .unwrap();
        assert!(matches!(interior_point(p.float_mirror(), T), Err(Error::NoInterior)));
        let m = minimize_exact(&p, T).unwrap().unwrap();
        assert!(m.rescued);
        assert_eq!(m.kept, vec![0, 1]);
    }

    #[test]
    fn witnesses_are_exact() {
        let p = example();
        let m = minimize_exact(&p, T).unwrap().unwrap();
        let kept = p.select(&m.kept);
        for (pos, w) in m.witnesses.iter().enumerate() {
            assert_eq!(
                verify_witness_exact(&kept, pos, w, &Rational::zero()),
                WitnessCheck::Confirmed
            );
        }
    }
}
