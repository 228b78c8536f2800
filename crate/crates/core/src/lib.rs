//! Exact polyhedral projection and convex hull by parametric linear
//! programming. Floating-point simplex answers are only used as hints:
//! every basis, region and redundancy decision is confirmed in rational
//! arithmetic.

pub mod checkers;
pub mod degeneracy;
pub mod error;
pub mod format;
pub mod lp;
pub mod matrix;
pub mod minimize;
pub mod oracle;
pub mod plp;
pub mod types;

pub use error::{Error, Result};
pub use types::{Constraint, Point, Polyhedron, Rational, Relation};
