//! Independent oracles and the random benchmark harness.

pub mod bench;
pub mod equality;
pub mod fm;
pub mod generator;

pub use bench::{run_bench, BenchConfig, BenchReport};
pub use equality::{entails, poly_equal, EqualityVerdict, Separation};
pub use fm::{fm_hull, fourier_motzkin, FM_ROW_CAP};
pub use generator::{generate, GeneratorParams};
