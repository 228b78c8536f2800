//! Scalars, constraints and polyhedra in exact and floating-point form.
//!
//! Every constraint is read as `coeffs · x + constant ≥ 0` (or `> 0` for
//! strict rows). A [`Polyhedron`] keeps its rational rows as the ground truth
//! and carries a binary64 mirror that is rebuilt whenever the rows change.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Exact point in some ambient space.
pub type Point = Vec<Rational>;

/// Floating-point point.
pub type FloatPoint = Vec<f64>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Nearest binary64 value of a rational.
pub fn to_f64(r: &Rational) -> Result<f64> {
    match r.to_f64() {
        Some(v) if v.is_finite() => Ok(v),
        _ => Err(Error::FloatOverflow(r.to_string())),
    }
}

/// Exact rational value of a finite binary64 number.
pub fn from_f64(v: f64) -> Result<Rational> {
    if !v.is_finite() {
        return Err(Error::NonFinite(v));
    }
    Rational::from_float(v).ok_or(Error::NonFinite(v))
}

pub fn point_from_f64(v: &[f64]) -> Result<Point> {
    v.iter().map(|&x| from_f64(x)).collect()
}

pub fn point_to_f64(v: &[Rational]) -> Result<FloatPoint> {
    v.iter().map(to_f64).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Finite binary64 scalar. NaN and infinities are rejected.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FloatScalar(f64);

impl FloatScalar {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::NonFinite(value))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<&Rational> for FloatScalar {
    type Error = Error;

    fn try_from(r: &Rational) -> Result<Self> {
        to_f64(r).map(Self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    /// `a·x + b ≥ 0`
    NonStrict,
    /// `a·x + b > 0`
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    coeffs: Vec<Rational>,
    constant: Rational,
    relation: Relation,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Self {
            coeffs,
            constant,
            relation: Relation::NonStrict,
        }
    }

    pub fn strict(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Self {
            coeffs,
            constant,
            relation: Relation::Strict,
        }
    }

    /// Builds a non-strict row from integers; the last entry is the constant.
    pub fn from_ints(row: &[i64]) -> Self {
        let (constant, coeffs) = row.split_last().expect("row needs a constant");
        Self::new(coeffs.iter().map(|&c| int(c)).collect(), int(*constant))
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn with_relation(mut self, relation: Relation) -> Self {
        self.relation = relation;
        self
    }

    /// `coeffs · pt + constant`, exactly.
    pub fn eval(&self, pt: &[Rational]) -> Result<Rational> {
        if pt.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: pt.len(),
            });
        }
        Ok(dot(&self.coeffs, pt) + &self.constant)
    }

    pub fn is_satisfied_by(&self, pt: &[Rational]) -> Result<bool> {
        let v = self.eval(pt)?;
        Ok(match self.relation {
            Relation::NonStrict => !v.is_negative(),
            Relation::Strict => v.is_positive(),
        })
    }

    pub fn eval_f64(&self, pt: &[f64]) -> Result<f64> {
        let row = FloatRow::try_from(self)?;
        Ok(row.eval(pt))
    }

    /// True when every coefficient is zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// A constant row that every point satisfies.
    pub fn is_tautology(&self) -> bool {
        self.is_constant()
            && match self.relation {
                Relation::NonStrict => !self.constant.is_negative(),
                Relation::Strict => self.constant.is_positive(),
            }
    }

    /// A constant row that no point satisfies.
    pub fn is_contradiction(&self) -> bool {
        self.is_constant() && !self.is_tautology()
    }

    /// Positive rescaling to coprime integer entries. Geometry is unchanged.
    pub fn normalized(&self) -> Self {
        let entries: Vec<&Rational> = self.coeffs.iter().chain([&self.constant]).collect();
        let lcm = entries.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = entries.iter().map(|r| r.numer() * (&lcm / r.denom())).collect();
        let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        if gcd.is_zero() {
            return self.clone();
        }
        let mut scaled: Vec<Rational> = ints.into_iter().map(|v| Rational::from_integer(v / &gcd)).collect();
        let constant = scaled.pop().expect("constant entry");
        Self {
            coeffs: scaled,
            constant,
            relation: self.relation,
        }
    }

    /// The opposite half-space `-(a·x + b) ≥ 0`.
    pub fn negated(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            constant: -&self.constant,
            relation: self.relation,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.coeffs {
            write!(f, "{} ", crate::format::format_rational(c))?;
        }
        write!(f, "{}", crate::format::format_rational(&self.constant))
    }
}

/// Binary64 image of a [`Constraint`].
#[derive(Clone, Debug, PartialEq)]
pub struct FloatRow {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl FloatRow {
    pub fn eval(&self, pt: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(pt)
            .fold(self.constant, |acc, (a, x)| acc + a * x)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

impl TryFrom<&Constraint> for FloatRow {
    type Error = Error;

    fn try_from(c: &Constraint) -> Result<Self> {
        Ok(Self {
            coeffs: c.coeffs.iter().map(to_f64).collect::<Result<_>>()?,
            constant: to_f64(&c.constant)?,
        })
    }
}

/// Binary64 rendering of a polyhedron.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatPolyhedron {
    dim: usize,
    rows: Vec<FloatRow>,
}

impl FloatPolyhedron {
    pub fn new(dim: usize, rows: Vec<FloatRow>) -> Result<Self> {
        for r in &rows {
            if r.coeffs.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.coeffs.len(),
                });
            }
            if !r.constant.is_finite() || r.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(f64::NAN));
            }
        }
        Ok(Self { dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[FloatRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// All constants are zero: the set is a cone with apex at the origin.
    pub fn is_cone(&self) -> bool {
        self.rows.iter().all(|r| r.constant == 0.0)
    }
}

/// Constraint-represented convex polyhedron with a cached float mirror.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    dim: usize,
    rows: Vec<Constraint>,
    unsatisfiable: bool,
    mirror: FloatPolyhedron,
}

impl PartialEq for Polyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rows == other.rows && self.unsatisfiable == other.unsatisfiable
    }
}

impl Polyhedron {
    /// Tautology rows are dropped; a contradiction row marks the polyhedron
    /// unsatisfiable (and is kept so the text form round-trips).
    pub fn new(dim: usize, rows: Vec<Constraint>) -> Result<Self> {
        let mut kept = Vec::with_capacity(rows.len());
        let mut unsatisfiable = false;
        for r in rows {
            if r.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.dim(),
                });
            }
            if r.is_tautology() {
                continue;
            }
            if r.is_contradiction() {
                if unsatisfiable {
                    continue;
                }
                unsatisfiable = true;
            }
            kept.push(r);
        }
        let mirror = to_float(dim, &kept)?;
        Ok(Self {
            dim,
            rows: kept,
            unsatisfiable,
            mirror,
        })
    }

    pub fn universe(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            unsatisfiable: false,
            mirror: FloatPolyhedron { dim, rows: Vec::new() },
        }
    }

    /// Builds from integer rows, each ending with its constant.
    pub fn from_ints(dim: usize, rows: &[&[i64]]) -> Result<Self> {
        Self::new(dim, rows.iter().map(|r| Constraint::from_ints(r)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &Constraint {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Contains a constant contradiction row. Emptiness in general needs an LP.
    pub fn is_trivially_unsatisfiable(&self) -> bool {
        self.unsatisfiable
    }

    pub fn float_mirror(&self) -> &FloatPolyhedron {
        &self.mirror
    }

    /// Every constant is zero: a cone apexed at the origin.
    pub fn is_cone(&self) -> bool {
        self.rows.iter().all(|r| r.constant().is_zero())
    }

    /// Keeps the rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        Self::new(self.dim, rows).expect("subset of a valid polyhedron")
    }

    pub fn contains(&self, pt: &[Rational]) -> Result<bool> {
        for r in &self.rows {
            if !r.is_satisfied_by(pt)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every row holds with strict inequality at `pt`.
    pub fn contains_strictly(&self, pt: &[Rational]) -> Result<bool> {
        for r in &self.rows {
            if !r.eval(pt)?.is_positive() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Rows rescaled to coprime integers, exact duplicates removed.
    pub fn normalized(&self) -> Self {
        let mut rows: Vec<Constraint> = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            let n = r.normalized();
            if !rows.contains(&n) {
                rows.push(n);
            }
        }
        Self::new(self.dim, rows).expect("rescaling keeps dimensions")
    }
}

fn to_float(dim: usize, rows: &[Constraint]) -> Result<FloatPolyhedron> {
    let rows = rows.iter().map(FloatRow::try_from).collect::<Result<_>>()?;
    FloatPolyhedron::new(dim, rows)
}

/// Nearest-float image of every row. Fails if an entry leaves binary64 range.
pub fn polyhedron_to_float(p: &Polyhedron) -> Result<FloatPolyhedron> {
    to_float(p.dim, &p.rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_converts_exactly() {
        let p = Polyhedron::new(1, vec![Constraint::new(vec![frac(1, 2)], int(0))]).unwrap();
        assert_eq!(p.float_mirror().rows()[0].coeffs, vec![0.5]);
        assert_eq!(from_f64(0.5).unwrap(), frac(1, 2));
    }

    #[test]
    fn near_ten_loses_accuracy_on_round_trip() {
        let r = frac(100000001, 10000000);
        let f = to_f64(&r).unwrap();
        assert!((f - 10.0000001).abs() < 1e-12);
        assert_ne!(from_f64(f).unwrap(), r);
    }

    #[test]
    fn empty_polyhedron_converts_to_empty_mirror() {
        let p = Polyhedron::new(3, vec![]).unwrap();
        assert!(polyhedron_to_float(&p).unwrap().is_empty());
    }

    #[test]
    fn huge_entry_overflows() {
        let big = Rational::from_integer(BigInt::from(10).pow(400));
        let err = Polyhedron::new(1, vec![Constraint::new(vec![big], int(0))]);
        assert!(matches!(err, Err(Error::FloatOverflow(_))));
    }

    #[test]
    fn eval_examples() {
        // x1 + x2 - 7 at (7/2, 7/2)
        let c = Constraint::from_ints(&[1, 1, -7]);
        assert_eq!(c.eval(&[frac(7, 2), frac(7, 2)]).unwrap(), int(0));
        let c = Constraint::from_ints(&[1, 0]);
        assert_eq!(c.eval(&[int(0)]).unwrap(), int(0));
        // -2 x2 + 3 > 0 at (0, 3/2): value 0, strict row violated
        let c = Constraint::strict(vec![int(0), int(-2)], int(3));
        assert_eq!(c.eval(&[int(0), frac(3, 2)]).unwrap(), int(0));
        assert!(!c.is_satisfied_by(&[int(0), frac(3, 2)]).unwrap());
        assert!(matches!(c.eval(&[int(0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn tautologies_dropped_contradictions_flagged() {
        let p = Polyhedron::from_ints(2, &[&[0, 0, 3], &[1, 0, 0]]).unwrap();
        assert_eq!(p.len(), 1);
        assert!(!p.is_trivially_unsatisfiable());
        let q = Polyhedron::from_ints(2, &[&[0, 0, -1], &[1, 0, 0]]).unwrap();
        assert!(q.is_trivially_unsatisfiable());
    }

    #[test]
    fn normalization_is_positive_scaling() {
        let c = Constraint::new(vec![frac(2, 3), frac(-4, 9)], frac(2, 1));
        let n = c.normalized();
        assert_eq!(n, Constraint::from_ints(&[3, -2, 9]));
        assert!(FloatScalar::new(f64::NAN).is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (any::<i32>(), 1i64..i32::MAX as i64).prop_map(|(n, d)| frac(n as i64, d))
    }

    proptest! {
        #[test]
        fn addition_round_trips(a in small_rat(), c in small_rat()) {
            prop_assert_eq!((&a + &c) - &c, a);
        }

        #[test]
        fn to_float_is_monotone(a in small_rat(), b in small_rat()) {
            let (fa, fb) = (to_f64(&a).unwrap(), to_f64(&b).unwrap());
            if a <= b { prop_assert!(fa <= fb); } else { prop_assert!(fa >= fb); }
        }

        #[test]
        fn to_float_is_idempotent_on_floats(v in -1e12f64..1e12) {
            let r = from_f64(v).unwrap();
            prop_assert_eq!(to_f64(&r).unwrap(), v);
        }

        #[test]
        fn exact_and_float_signs_agree(
            coeffs in proptest::collection::vec(-1000i64..1000, 3),
            b in -1000i64..1000,
            pt in proptest::collection::vec((-1000i64..1000, 1i64..50), 3),
        ) {
            let c = Constraint::new(coeffs.iter().map(|&v| int(v)).collect(), int(b));
            let exact_pt: Vec<Rational> = pt.iter().map(|&(n, d)| frac(n, d)).collect();
            let float_pt = point_to_f64(&exact_pt).unwrap();
            let exact = c.eval(&exact_pt).unwrap();
            let approx = c.eval_f64(&float_pt).unwrap();
            let magnitude = 1.0 + coeffs.iter().map(|v| v.abs() as f64).sum::<f64>() + b.abs() as f64;
            if approx.abs() > 1e-6 * magnitude {
                prop_assert_eq!(exact.is_positive(), approx > 0.0);
            }
        }
    }
}
