//! Random polyhedra in the style of the standard projection benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{int, Constraint, Polyhedron};

/// Largest coefficient magnitude.
pub const COEFF_RANGE: i64 = 50;

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    /// Number of constraints (CN).
    pub constraints: usize,
    /// Number of variables (VN).
    pub variables: usize,
    /// Fraction of variables eliminated (PR), in (0, 1].
    pub projection_ratio: f64,
    /// Fraction of zero coefficients (D), in [0, 1).
    pub density: f64,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        if self.variables == 0 {
            return Err(Error::InvalidArgument("VN must be positive".into()));
        }
        if !(self.projection_ratio > 0.0 && self.projection_ratio <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "PR = {} is outside (0, 1]",
                self.projection_ratio
            )));
        }
        if !(0.0..1.0).contains(&self.density) {
            return Err(Error::InvalidArgument(format!(
                "D = {} is outside [0, 1)",
                self.density
            )));
        }
        Ok(())
    }

    /// The eliminated variables: the first `round(PR·VN)` of them, at least one.
    pub fn eliminated(&self) -> Vec<usize> {
        let e = (self.projection_ratio * self.variables as f64).round() as usize;
        (0..e.clamp(1, self.variables)).collect()
    }
}

/// Draws `CN` rows over `VN` variables. Each coefficient is zero with
/// probability `D` and otherwise a uniform nonzero integer in [-50, 50];
/// all-zero rows are redrawn. Constants are chosen so that a random integer
/// point satisfies every row with slack between 1 and 50.
pub fn generate(params: &GeneratorParams) -> Result<Polyhedron> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.variables;
    let z: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
    let mut rows = Vec::with_capacity(params.constraints);
    while rows.len() < params.constraints {
        let coeffs: Vec<i64> = (0..n)
            .map(|_| {
                if rng.gen_bool(params.density) {
                    0
                } else {
                    let v = rng.gen_range(1..=COEFF_RANGE);
                    if rng.gen_bool(0.5) {
                        v
                    } else {
                        -v
                    }
                }
            })
            .collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        let at_z: i64 = coeffs.iter().zip(&z).map(|(a, b)| a * b).sum();
        let slack = rng.gen_range(1..=COEFF_RANGE);
        rows.push(Constraint::new(
            coeffs.into_iter().map(int).collect(),
            int(slack - at_z),
        ));
    }
    Polyhedron::new(n, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(d: f64, seed: u64) -> GeneratorParams {
        GeneratorParams {
            constraints: 19,
            variables: 8,
            projection_ratio: 0.625,
            density: d,
            seed,
        }
    }

    #[test]
    fn crossover_configuration_eliminates_five() {
        assert_eq!(params(0.375, 1).eliminated(), vec![0, 1, 2, 3, 4]);
        assert_eq!(generate(&params(0.375, 1)).unwrap().len(), 19);
    }

    #[test]
    fn zero_density_has_no_zero_coefficients() {
        let p = generate(&params(0.0, 3)).unwrap();
        assert!(p.rows().iter().flat_map(|r| r.coeffs()).all(|c| *c != int(0)));
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            generate(&params(0.375, 9)).unwrap(),
            generate(&params(0.375, 9)).unwrap()
        );
        assert_ne!(
            generate(&params(0.375, 9)).unwrap(),
            generate(&params(0.375, 10)).unwrap()
        );
    }

    #[test]
    fn coefficients_in_range() {
        let p = generate(&params(0.2, 4)).unwrap();
        assert!(p
            .rows()
            .iter()
            .flat_map(|r| r.coeffs())
            .all(|c| *c >= int(-COEFF_RANGE) && *c <= int(COEFF_RANGE)));
    }

    #[test]
    fn invalid_parameters() {
        let mut p = params(0.0, 0);
        p.projection_ratio = 0.0;
        assert!(generate(&p).is_err());
        p.projection_ratio = 0.5;
        p.density = 1.0;
        assert!(generate(&p).is_err());
    }
}
