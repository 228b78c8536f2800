//! Parametric linear programming for projection and convex hull.

pub mod problem;
pub mod region;
pub mod solver;

pub use problem::{construct_hull, construct_projection, interior_point_exact, PlpKind, PlpProblem};
pub use region::{analyze_basis, build_region, extract_region, BasisAnalysis, Frontier, OptimalFunction, Region};
pub use solver::{
    add_extra_point, adjacency_sweep, audit, check_covered, hull, interiors_intersect, project, solve, AuditReport,
    FaultInjection, PlpSolution, SolveOptions, SolveStats,
};
