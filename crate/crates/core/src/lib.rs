//! Descent method for nonsmooth multiobjective optimization.
//!
//! Descent directions come from the minimum-norm element of the convex hull
//! of sampled epsilon-subgradients, enriched by bisection until the
//! direction is acceptable for every objective. The crate also provides an
//! Armijo-type solver, a catalog of bi-objective test problems, a box
//! subdivision algorithm for covering Pareto sets, and independent
//! reference oracles for testing.

pub mod config;
pub mod descent;
pub mod direction;
pub mod error;
pub mod linalg;
pub mod minnorm;
pub mod problem;
pub mod problems;
pub mod subdivision;
pub mod validation;

pub use config::{Enrichment, History, InitialStep, SolverConfig};
pub use descent::{armijo_step, is_eps_delta_critical, solve, solve_eps_decreasing, ArmijoStep, SolverRun, Stage, StopReason, TraceRow};
pub use direction::{compute_descent_direction, find_new_subgradient, DirectionOutcome, DirectionStatus};
pub use error::{Error, Result};
pub use minnorm::{min_norm_point, Bundle, MinNormSolution};
pub use problem::{dominates, nondominated_mask, BoundingBox, CounterSnapshot, NonsmoothSet, ObjectiveOracle, Problem};
