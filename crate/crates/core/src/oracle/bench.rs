//! Timing harness over random instances.

use std::fmt;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::plp::{project, SolveOptions};

use super::equality::poly_equal;
use super::fm::fourier_motzkin;
use super::generator::{generate, GeneratorParams};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub constraints: usize,
    pub variables: usize,
    pub projection_ratio: f64,
    pub density: f64,
    pub instances: usize,
    pub repeats: usize,
    pub seed: u64,
    pub oracle: bool,
    pub solve: SolveOptions,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchReport {
    pub instances: usize,
    pub repeats: usize,
    pub mean_time: Duration,
    pub mean_regions: f64,
    pub mean_faces: f64,
    pub oracle_equal: usize,
    pub oracle_unequal: usize,
    /// Instances the oracle could not handle.
    pub oracle_skipped: usize,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances {}", self.instances)?;
        writeln!(f, "repeats {}", self.repeats)?;
        writeln!(f, "mean_time_ms {:.3}", self.mean_time.as_secs_f64() * 1e3)?;
        writeln!(f, "mean_regions {:.2}", self.mean_regions)?;
        writeln!(f, "mean_faces {:.2}", self.mean_faces)?;
        writeln!(f, "oracle_equal {}", self.oracle_equal)?;
        writeln!(f, "oracle_unequal {}", self.oracle_unequal)?;
        write!(f, "oracle_skipped {}", self.oracle_skipped)
    }
}

/// Projects `instances` generated polyhedra `repeats` times each and reports
/// the mean wall-clock time per projection. Instance `i` uses seed
/// `seed + i`.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut report = BenchReport {
        instances: cfg.instances,
        repeats: cfg.repeats,
        ..BenchReport::default()
    };
    let mut total = Duration::ZERO;
    let mut runs = 0u32;
    for i in 0..cfg.instances {
        let params = GeneratorParams {
            constraints: cfg.constraints,
            variables: cfg.variables,
            projection_ratio: cfg.projection_ratio,
            density: cfg.density,
            seed: cfg.seed.wrapping_add(i as u64),
        };
        let poly = generate(&params)?;
        let eliminate = params.eliminated();
        let mut last = None;
        for _ in 0..cfg.repeats.max(1) {
            let start = Instant::now();
            let sol = project(&poly, &eliminate, &cfg.solve)?;
            let out = sol.polyhedron()?;
            total += start.elapsed();
            runs += 1;
            last = Some((sol.num_regions(), out));
        }
        let (regions, out) = last.expect("at least one repeat");
        report.mean_regions += regions as f64;
        report.mean_faces += out.len() as f64;
        if cfg.oracle {
            match fourier_motzkin(&poly, &eliminate) {
                Ok(fm) if poly_equal(&fm, &out).equal => report.oracle_equal += 1,
                Ok(_) => report.oracle_unequal += 1,
                Err(_) => report.oracle_skipped += 1,
            }
        }
    }
    if cfg.instances > 0 {
        report.mean_time = total / runs;
        report.mean_regions /= cfg.instances as f64;
        report.mean_faces /= cfg.instances as f64;
    }
    Ok(report)
}
