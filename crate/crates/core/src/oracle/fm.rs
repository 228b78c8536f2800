//! Fourier-Motzkin elimination in rational arithmetic.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{farkas_combination_hinted, ineq_lp_f64, AffineRow, IneqOutcome};
use crate::types::{point_from_f64, to_f64, Constraint, Polyhedron, Rational};

const FLOAT_TOL: f64 = 1e-9;
/// Half-width of the box around the interior point in witness searches,
/// relative to its largest coordinate.
const WITNESS_BOX: f64 = 1e3;
/// Violated rows added to a witness LP per round.
const ROWS_PER_ROUND: usize = 8;

/// Intermediate row count beyond which elimination gives up.
pub const FM_ROW_CAP: usize = 20_000;

#[derive(Clone, Debug)]
struct Row {
    c: Constraint,
    /// Input rows combined into this one, sorted.
    history: Vec<usize>,
}

/// Combination of `pos` and `neg` cancelling column `j`, with that column
/// dropped.
fn combine(pos: &Row, neg: &Row, j: usize) -> Row {
    let alpha = -neg.c.coeffs()[j].clone();
    let beta = pos.c.coeffs()[j].clone();
    let coeffs = pos
        .c
        .coeffs()
        .iter()
        .zip(neg.c.coeffs())
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, (a, b))| a * &alpha + b * &beta)
        .collect();
    let constant = pos.c.constant() * &alpha + neg.c.constant() * &beta;
    let mut history: Vec<usize> = pos.history.iter().chain(&neg.history).copied().collect();
    history.sort_unstable();
    history.dedup();
    Row {
        c: Constraint::new(coeffs, constant).normalized(),
        history,
    }
}

fn drop_column(row: Row, j: usize) -> Row {
    let mut coeffs = row.c.coeffs().to_vec();
    coeffs.remove(j);
    Row {
        c: Constraint::new(coeffs, row.c.constant().clone()),
        history: row.history,
    }
}

fn unit_float(c: &Constraint) -> Option<AffineRow<f64>> {
    let coeffs: Vec<f64> = c.coeffs().iter().map(|v| to_f64(v).ok()).collect::<Option<_>>()?;
    let constant = to_f64(c.constant()).ok()?;
    let norm = coeffs.iter().map(|v| v * v).sum::<f64>().sqrt();
    (norm > 0.0).then(|| (coeffs.iter().map(|v| v / norm).collect(), constant / norm))
}

/// Point where every row has positive slack, if a float LP finds one.
fn float_interior(rows: &[AffineRow<f64>], dim: usize) -> Option<Vec<f64>> {
    let mut ineq: Vec<AffineRow<f64>> = rows
        .iter()
        .map(|(a, b)| {
            let mut c = a.clone();
            c.push(-1.0);
            (c, *b)
        })
        .collect();
    let mut cap = vec![0.0; dim + 1];
    cap[dim] = -1.0;
    ineq.push((cap, 1.0));
    let mut objective = vec![0.0; dim + 1];
    objective[dim] = 1.0;
    match ineq_lp_f64(dim + 1, &ineq, &[], &objective, FLOAT_TOL) {
        IneqOutcome::Optimal(mut x) => {
            let s = x.pop()?;
            (s > 1e-9).then_some(x)
        }
        _ => None,
    }
}

/// `w` violates row `i` and satisfies the other active rows, exactly.
fn confirms(rows: &[Row], active: &[bool], i: usize, w: &[f64]) -> bool {
    let Ok(w) = point_from_f64(w) else { return false };
    rows.iter().enumerate().all(|(k, r)| {
        if k == i {
            r.c.eval(&w).is_ok_and(|v| v.is_negative())
        } else {
            !active[k] || r.c.eval(&w).is_ok_and(|v| !v.is_negative())
        }
    })
}

/// Float search for a point violating row `i` and no other active row,
/// confirmed exactly before it is trusted. Other rows enter the LP only
/// once a candidate violates them.
fn certified_witness(rows: &[Row], units: &[AffineRow<f64>], active: &[bool], i: usize, x0: &[f64]) -> bool {
    let dim = x0.len();
    let target = &units[i];
    let others: Vec<usize> = (0..rows.len()).filter(|&k| k != i && active[k]).collect();
    let half_width = WITNESS_BOX * (1.0 + x0.iter().fold(0.0f64, |m, v| m.max(v.abs())));
    let mut ineq: Vec<AffineRow<f64>> = Vec::new();
    for (j, &c) in x0.iter().enumerate() {
        for sign in [1.0, -1.0] {
            let mut coeffs = vec![0.0; dim];
            coeffs[j] = -sign;
            ineq.push((coeffs, half_width + sign * c));
        }
    }
    ineq.push((target.0.clone(), target.1 + 1.0));
    let objective: Vec<f64> = target.0.iter().map(|v| -v).collect();
    let mut included = vec![false; rows.len()];
    let x = loop {
        let IneqOutcome::Optimal(x) = ineq_lp_f64(dim, &ineq, &[], &objective, FLOAT_TOL) else {
            return false;
        };
        let mut violated: Vec<(f64, usize)> = others
            .iter()
            .filter(|&&k| !included[k])
            .map(|&k| {
                let (a, b) = &units[k];
                (b + a.iter().zip(&x).map(|(u, v)| u * v).sum::<f64>(), k)
            })
            .filter(|&(v, _)| v < 0.0)
            .collect();
        if violated.is_empty() {
            break x;
        }
        violated.sort_by(|a, b| a.0.total_cmp(&b.0));
        for &(_, k) in violated.iter().take(ROWS_PER_ROUND) {
            included[k] = true;
            ineq.push(units[k].clone());
        }
    };
    // The optimum is a vertex where other rows are tight; move towards the
    // interior so they hold strictly.
    [1e-6, 1e-4, 1e-2].iter().any(|eps| {
        let w: Vec<f64> = x.iter().zip(x0).map(|(a, b)| a + eps * (b - a)).collect();
        confirms(rows, active, i, &w)
    })
}

/// Shoots a ray from `x0` towards each row; a row hit strictly first has a
/// witness just beyond the hit, which is confirmed exactly.
fn ray_witnesses(rows: &[Row], units: &[AffineRow<f64>], x0: &[f64]) -> Vec<bool> {
    let slack: Vec<f64> = units
        .iter()
        .map(|(a, b)| b + a.iter().zip(x0).map(|(u, v)| u * v).sum::<f64>())
        .collect();
    let all = vec![true; rows.len()];
    let mut found = vec![false; rows.len()];
    for (dir, _) in units {
        let mut hits: Vec<(f64, usize)> = units
            .iter()
            .enumerate()
            .filter_map(|(k, (a, _))| {
                let rate: f64 = a.iter().zip(dir).map(|(u, v)| u * v).sum();
                (rate > 1e-12).then(|| (slack[k] / rate, k))
            })
            .collect();
        hits.sort_by(|x, y| x.0.total_cmp(&y.0));
        let Some(&(first, k)) = hits.first() else { continue };
        if found[k] {
            continue;
        }
        let step = match hits.get(1) {
            Some(&(second, _)) if second - first > 1e-9 * (1.0 + first) => (first + second) / 2.0,
            Some(_) => continue,
            None => first + 1.0,
        };
        let w: Vec<f64> = x0.iter().zip(dir).map(|(x, a)| x - step * a).collect();
        found[k] = confirms(rows, &all, k, &w);
    }
    found
}

/// Removes rows implied by the others, one at a time in order. A row is
/// kept outright when an exactly checked witness point exists; otherwise
/// a Farkas combination, verified exactly, decides.
fn farkas_reduce(rows: Vec<Row>, dim: usize) -> Vec<Row> {
    let units: Option<Vec<AffineRow<f64>>> = rows.iter().map(|r| unit_float(&r.c)).collect();
    let float = units.and_then(|u| float_interior(&u, dim).map(|x0| (u, x0)));
    let witnessed = match &float {
        Some((u, x0)) => ray_witnesses(&rows, u, x0),
        None => vec![false; rows.len()],
    };
    let mut active = vec![true; rows.len()];
    for i in 0..rows.len() {
        if witnessed[i] {
            continue;
        }
        if let Some((u, x0)) = &float {
            if certified_witness(&rows, u, &active, i, x0) {
                continue;
            }
        }
        let others: Vec<Constraint> = (0..rows.len())
            .filter(|&k| k != i && active[k])
            .map(|k| rows[k].c.clone())
            .collect();
        if farkas_combination_hinted(&rows[i].c, &others, FLOAT_TOL).is_some() {
            active[i] = false;
        }
    }
    rows.into_iter()
        .zip(active)
        .filter_map(|(r, a)| a.then_some(r))
        .collect()
}

/// Projection of `p` onto the coordinates not in `eliminate`, computed one
/// variable at a time with Chernikov's rule and exact redundancy removal
/// after each step. The result is expressed over the kept coordinates in
/// ascending order.
pub fn fourier_motzkin(p: &Polyhedron, eliminate: &[usize]) -> Result<Polyhedron> {
    let dim = p.dim();
    if let Some(&bad) = eliminate.iter().find(|&&j| j >= dim) {
        return Err(Error::InvalidArgument(format!(
            "variable index {} exceeds dimension {dim}",
            bad + 1
        )));
    }
    let mut rows: Vec<Row> = Vec::new();
    for (i, c) in p.rows().iter().enumerate() {
        let c = c.normalized();
        if !rows.iter().any(|r| r.c == c) {
            rows.push(Row { c, history: vec![i] });
        }
    }
    // Original indices of the columns still present.
    let mut columns: Vec<usize> = (0..dim).collect();
    let mut steps = 0;
    for &var in eliminate {
        let Some(j) = columns.iter().position(|&c| c == var) else {
            continue;
        };
        columns.remove(j);
        steps += 1;
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for r in rows {
            let a = &r.c.coeffs()[j];
            if a.is_positive() {
                pos.push(r);
            } else if a.is_negative() {
                neg.push(r);
            } else {
                next.push(drop_column(r, j));
            }
        }
        for pr in &pos {
            for nr in &neg {
                let combined = combine(pr, nr, j);
                // Chernikov: more than k+1 ancestors after k steps is redundant.
                if combined.history.len() > steps + 1 || combined.c.is_tautology() {
                    continue;
                }
                if !next.iter().any(|r: &Row| r.c == combined.c) {
                    next.push(combined);
                }
                if next.len() > FM_ROW_CAP {
                    return Err(Error::OracleLimit(format!(
                        "more than {FM_ROW_CAP} rows while eliminating x{}",
                        var + 1
                    )));
                }
            }
        }
        rows = farkas_reduce(next, columns.len());
    }
    Polyhedron::new(columns.len(), rows.into_iter().map(|r| r.c).collect())
}

/// Closed convex hull of `p1 ∪ p2`, by eliminating `x1` and `s` from
/// `A1·x1 + b1·s ≥ 0`, `A2·(x - x1) + b2·(1 - s) ≥ 0`, `0 ≤ s ≤ 1`.
pub fn fm_hull(p1: &Polyhedron, p2: &Polyhedron) -> Result<Polyhedron> {
    let d = p1.dim();
    if p2.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p2.dim(),
        });
    }
    let zero = || Rational::zero();
    // Variable order: x (d), x1 (d), s.
    let mut rows = Vec::new();
    for r in p1.rows() {
        let mut c = vec![zero(); d];
        c.extend(r.coeffs().iter().cloned());
        c.push(r.constant().clone());
        rows.push(Constraint::new(c, zero()));
    }
    for r in p2.rows() {
        let mut c: Vec<Rational> = r.coeffs().to_vec();
        c.extend(r.coeffs().iter().map(|a| -a));
        c.push(-r.constant());
        rows.push(Constraint::new(c, r.constant().clone()));
    }
    let mut s = vec![zero(); 2 * d + 1];
    s[2 * d] = Rational::one();
    rows.push(Constraint::new(s.clone(), zero()));
    s[2 * d] = -Rational::one();
    rows.push(Constraint::new(s, Rational::one()));
    let lifted = Polyhedron::new(2 * d + 1, rows)?;
    fourier_motzkin(&lifted, &(d..=2 * d).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::equality::poly_equal;
    use crate::types::{frac, int};

    #[test]
    fn square_eliminate_x2() {
        let sq = Polyhedron::from_ints(2, &[&[1, 0, 0], &[-1, 0, 1], &[0, 1, 0], &[0, -1, 1]]).unwrap();
        let out = fourier_motzkin(&sq, &[1]).unwrap();
        assert!(poly_equal(&out, &Polyhedron::from_ints(1, &[&[1, 0], &[-1, 1]]).unwrap()).equal);
    }

    #[test]
    fn example_eliminate_x2() {
        let p = Polyhedron::from_ints(2, &[&[-1, 2, -2], &[2, -1, -1], &[-1, -1, 8], &[2, 4, -7]]).unwrap();
        let out = fourier_motzkin(&p, &[1]).unwrap();
        // C1 + 2·C2 and C1 + 2·C3, divided by 3.
        let expected = Polyhedron::new(
            1,
            vec![
                Constraint::new(vec![int(1)], frac(-4, 3)),
                Constraint::new(vec![int(-1)], frac(14, 3)),
            ],
        )
        .unwrap();
        assert!(poly_equal(&out, &expected).equal);
    }

    #[test]
    fn hull_of_two_points() {
        let a = Polyhedron::from_ints(1, &[&[1, 0], &[-1, 0]]).unwrap();
        let b = Polyhedron::from_ints(1, &[&[1, -2], &[-1, 2]]).unwrap();
        let h = fm_hull(&a, &b).unwrap();
        assert!(poly_equal(&h, &Polyhedron::from_ints(1, &[&[1, 0], &[-1, 2]]).unwrap()).equal);
    }

    #[test]
    fn elimination_order_does_not_matter() {
        let p = Polyhedron::from_ints(
            3,
            &[
                &[1, 1, 1, 3],
                &[-1, 2, 0, 4],
                &[0, -1, 1, 2],
                &[1, 0, -2, 5],
                &[-1, -1, -1, 6],
            ],
        )
        .unwrap();
        let a = fourier_motzkin(&p, &[1, 2]).unwrap();
        let b = fourier_motzkin(&p, &[2, 1]).unwrap();
        assert!(poly_equal(&a, &b).equal);
    }
}
