//! Instances shared by the criterion benchmarks.

use plp_core::oracle::{generate, GeneratorParams};
use plp_core::Polyhedron;

/// A generated instance and the variables to eliminate from it.
pub struct Instance {
    pub name: String,
    pub poly: Polyhedron,
    pub eliminate: Vec<usize>,
}

pub fn instance(constraints: usize, variables: usize, projection_ratio: f64, density: f64, seed: u64) -> Instance {
    let params = GeneratorParams {
        constraints,
        variables,
        projection_ratio,
        density,
        seed,
    };
    Instance {
        name: format!("cn{constraints}_vn{variables}_pr{projection_ratio}_d{density}_s{seed}"),
        poly: generate(&params).expect("valid generator parameters"),
        eliminate: params.eliminated(),
    }
}

/// Small, medium and crossover-sized instances.
pub fn suite() -> Vec<Instance> {
    vec![
        instance(8, 4, 0.5, 0.25, 1),
        instance(12, 6, 0.5, 0.25, 2),
        instance(19, 8, 0.625, 0.375, 3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_is_well_formed() {
        for inst in suite() {
            assert!(!inst.eliminate.is_empty());
            assert!(inst.eliminate.iter().all(|&j| j < inst.poly.dim()));
        }
    }
}
