//! Dense exact linear algebra over rationals.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::types::{to_f64, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RationalMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| crate::types::int(v)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (k, &c) in cols.iter().enumerate() {
                m[(r, k)] = self[(r, c)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_rows(rows.iter().map(|&r| self.row(r).to_vec()).collect())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn to_f64(&self) -> Result<Vec<Vec<f64>>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(to_f64).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn scale_row(&mut self, r: usize, factor: &Rational) {
        for v in &mut self.data[r * self.cols..(r + 1) * self.cols] {
            if !v.is_zero() {
                *v *= factor;
            }
        }
    }

    /// row[target] -= factor * row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &Rational) {
        for c in 0..self.cols {
            let s = &self.data[source * self.cols + c];
            if s.is_zero() {
                continue;
            }
            let delta = factor * s;
            self.data[target * self.cols + c] -= delta;
        }
    }

    fn is_zero_row(&self, r: usize) -> bool {
        self.row(r).iter().all(Zero::is_zero)
    }
}

impl std::ops::Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

/// Result of [`row_echelon`].
#[derive(Clone, Debug)]
pub struct Echelon {
    pub matrix: RationalMatrix,
    /// For each requested pivot column, the row holding its unit pivot.
    pub pivots: Vec<Option<usize>>,
    /// Product `E` of the elementary operations: `E · input = matrix`.
    pub transform: RationalMatrix,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.iter().flatten().count()
    }
}

/// Gauss-Jordan reduction making the requested columns an identity block
/// where possible. Pivots are taken as the first nonzero entry at or below
/// the current row. Rows that end up entirely zero are moved to the bottom.
pub fn row_echelon(m: &RationalMatrix, pivot_cols: &[usize]) -> Result<Echelon> {
    let (matrix, pivots, transform) = reduce(m, pivot_cols, true)?;
    Ok(Echelon {
        matrix,
        pivots,
        transform: transform.expect("transform requested"),
    })
}

/// [`row_echelon`] without the transform.
pub fn row_reduce(m: &RationalMatrix, pivot_cols: &[usize]) -> Result<(RationalMatrix, Vec<Option<usize>>)> {
    let (matrix, pivots, _) = reduce(m, pivot_cols, false)?;
    Ok((matrix, pivots))
}

type Reduced = (RationalMatrix, Vec<Option<usize>>, Option<RationalMatrix>);

fn reduce(m: &RationalMatrix, pivot_cols: &[usize], track: bool) -> Result<Reduced> {
    let mut seen = vec![false; m.cols];
    for &c in pivot_cols {
        if c >= m.cols || std::mem::replace(&mut seen[c], true) {
            return Err(Error::InvalidArgument(format!(
                "pivot column {c} out of range or repeated"
            )));
        }
    }

    let mut a = m.clone();
    let mut e = track.then(|| RationalMatrix::identity(m.rows));
    let mut pivots = Vec::with_capacity(pivot_cols.len());
    let mut next = 0;
    for &c in pivot_cols {
        let Some(p) = (next..a.rows).find(|&r| !a[(r, c)].is_zero()) else {
            pivots.push(None);
            continue;
        };
        a.swap_rows(next, p);
        let inv = a[(next, c)].recip();
        a.scale_row(next, &inv);
        if let Some(e) = e.as_mut() {
            e.swap_rows(next, p);
            e.scale_row(next, &inv);
        }
        for r in 0..a.rows {
            if r == next || a[(r, c)].is_zero() {
                continue;
            }
            let f = a[(r, c)].clone();
            a.add_row_multiple(r, next, &f);
            if let Some(e) = e.as_mut() {
                e.add_row_multiple(r, next, &f);
            }
        }
        pivots.push(Some(next));
        next += 1;
    }

    // Sink zero rows below the unpivoted nonzero ones.
    let mut order: Vec<usize> = (0..next).collect();
    let (zero, nonzero): (Vec<usize>, Vec<usize>) = (next..a.rows).partition(|&r| a.is_zero_row(r));
    order.extend(nonzero);
    order.extend(zero);
    Ok((a.select_rows(&order), pivots, e.map(|e| e.select_rows(&order))))
}

/// Solves `basis · X = rhs` exactly for square `basis`.
pub fn solve_columns(basis: &RationalMatrix, rhs: &RationalMatrix) -> Result<RationalMatrix> {
    let n = basis.rows;
    if basis.cols != n {
        return Err(Error::InvalidArgument(format!(
            "basis must be square, got {}x{}",
            basis.rows, basis.cols
        )));
    }
    if rhs.rows != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.rows,
        });
    }
    let mut aug = RationalMatrix::zeros(n, n + rhs.cols);
    for r in 0..n {
        for c in 0..n {
            aug[(r, c)] = basis[(r, c)].clone();
        }
        for c in 0..rhs.cols {
            aug[(r, n + c)] = rhs[(r, c)].clone();
        }
    }
    let pivot_cols: Vec<usize> = (0..n).collect();
    let (reduced, pivots) = row_reduce(&aug, &pivot_cols)?;
    if pivots.iter().any(Option::is_none) {
        return Err(Error::SingularBasis);
    }
    let solution_cols: Vec<usize> = (n..n + rhs.cols).collect();
    Ok(reduced.select_columns(&solution_cols))
}

/// Rewrites the objective matrix `o` so that its columns over `basic_cols`
/// vanish: `Θ = O_B · M_B⁻¹`, `O' = O − Θ·M`. Returns `(Θ, O')`.
pub fn reconstruct_objective(
    m: &RationalMatrix,
    o: &RationalMatrix,
    basic_cols: &[usize],
) -> Result<(RationalMatrix, RationalMatrix)> {
    if m.cols != o.cols {
        return Err(Error::DimensionMismatch {
            expected: m.cols,
            found: o.cols,
        });
    }
    let m_b = m.select_columns(basic_cols);
    let o_b = o.select_columns(basic_cols);
    // Θᵀ solves M_Bᵀ Θᵀ = O_Bᵀ.
    let theta = solve_columns(&m_b.transpose(), &o_b.transpose())?.transpose();
    let o_prime = o.sub(&theta.mul(m)?)?;
    Ok((theta, o_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{frac, int};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RationalMatrix {
        RationalMatrix::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| int(rng.gen_range(-9..=9))).collect())
                .collect(),
        )
    }

    #[test]
    fn identity_is_already_reduced() {
        let i = RationalMatrix::identity(2);
        let e = row_echelon(&i, &[0, 1]).unwrap();
        assert_eq!(e.matrix, i);
        assert_eq!(e.pivots, vec![Some(0), Some(1)]);
    }

    #[test]
    fn rank_one_reports_missing_pivot() {
        let m = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        let e = row_echelon(&m, &[0, 1]).unwrap();
        assert_eq!(e.matrix, RationalMatrix::from_i64(&[&[1, 2], &[0, 0]]));
        assert_eq!(e.pivots, vec![Some(0), None]);
        assert_eq!(e.rank(), 1);
    }

    #[test]
    fn zero_rows_sink() {
        let m = RationalMatrix::from_i64(&[&[0, 0, 0], &[0, 1, 1], &[0, 0, 0], &[0, 0, 1]]);
        let e = row_echelon(&m, &[0]).unwrap();
        assert_eq!(e.pivots, vec![None]);
        assert!(e.matrix.row(0).iter().any(|v| !v.is_zero()));
        assert!(e.matrix.row(1).iter().any(|v| !v.is_zero()));
        assert!(e.matrix.row(2).iter().all(Zero::is_zero));
        assert!(e.matrix.row(3).iter().all(Zero::is_zero));
    }

    #[test]
    fn bad_pivot_list_is_rejected() {
        let m = RationalMatrix::identity(2);
        assert!(row_echelon(&m, &[0, 0]).is_err());
        assert!(row_echelon(&m, &[2]).is_err());
    }

    #[test]
    fn transform_reproduces_result() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 5, 7);
            let e = row_echelon(&m, &[6, 0, 3, 2, 5]).unwrap();
            assert_eq!(e.transform.mul(&m).unwrap(), e.matrix);
        }
    }

    #[test]
    fn solve_examples() {
        let rhs = RationalMatrix::from_i64(&[&[3, 4], &[5, 6]]);
        assert_eq!(solve_columns(&RationalMatrix::identity(2), &rhs).unwrap(), rhs);
        let basis = RationalMatrix::from_i64(&[&[2, 0], &[0, 4]]);
        let x = solve_columns(&basis, &RationalMatrix::identity(2)).unwrap();
        assert_eq!(
            x,
            RationalMatrix::from_rows(vec![vec![frac(1, 2), int(0)], vec![int(0), frac(1, 4)]])
        );
        let singular = RationalMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(matches!(solve_columns(&singular, &rhs), Err(Error::SingularBasis)));
    }

    #[test]
    fn random_systems_solve_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut solved = 0;
        while solved < 10 {
            let b = random_matrix(&mut rng, 6, 6);
            let rhs = random_matrix(&mut rng, 6, 3);
            if let Ok(x) = solve_columns(&b, &rhs) {
                assert_eq!(b.mul(&x).unwrap(), rhs);
                solved += 1;
            }
        }
    }

    #[test]
    fn reconstruction_zeroes_basic_columns() {
        // One constraint row [1 1 | 1]; objective over one parameter + constant.
        let m = RationalMatrix::from_i64(&[&[1, 1, 1]]);
        let o = RationalMatrix::from_i64(&[&[2, 3, 0], &[1, -1, 0]]);
        let (theta, o_prime) = reconstruct_objective(&m, &o, &[0]).unwrap();
        assert_eq!(theta, RationalMatrix::from_i64(&[&[2], &[1]]));
        assert_eq!(o_prime, RationalMatrix::from_i64(&[&[0, 1, -2], &[0, -2, -1]]));
    }

    #[test]
    fn reconstruction_keeps_objective_already_zero_on_basis() {
        let m = RationalMatrix::from_i64(&[&[1, 2, 0, 1], &[0, 1, 1, 2]]);
        let o = RationalMatrix::from_i64(&[&[0, 5, 0, 0], &[0, -1, 0, 0]]);
        let (_, o_prime) = reconstruct_objective(&m, &o, &[0, 2]).unwrap();
        assert_eq!(o_prime, o);
    }

    #[test]
    fn reconstruction_invariant_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 10 {
            let m = random_matrix(&mut rng, 3, 7);
            let o = random_matrix(&mut rng, 4, 7);
            let basic = [1, 4, 5];
            if let Ok((_, o_prime)) = reconstruct_objective(&m, &o, &basic) {
                for &j in &basic {
                    assert!(o_prime.column(j).iter().all(Zero::is_zero));
                }
                checked += 1;
            }
        }
    }
}
