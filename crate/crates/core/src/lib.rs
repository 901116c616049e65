//! Solver toolkit for the multi-vehicle pickup and delivery problem with
//! time windows (m-PDPTW).
//!
//! * [`model`] holds the problem data, schedule and load propagation, the
//!   feasibility checker and the cost function.
//! * [`ga`] is the dual-population genetic algorithm: permutation and
//!   vehicle-count chromosomes, repair operators, variation operators and the
//!   full cross-product evaluation of both populations.
//! * [`oracle`] enumerates every routed solution of small instances and
//!   carries an independent feasibility checker used for differential tests.
//! * [`io`] reads and writes instances and solution reports and generates
//!   random instances that are feasible by construction.
//!
//! The `parallel` feature (on by default) spreads the population evaluation
//! sweep over a rayon pool. Without it, or with one worker, the same sweep
//! runs serially and yields bit-identical results.

pub mod ga;
pub mod io;
pub mod model;
pub mod oracle;

pub use ga::{run_ga, GaParams, GaResult};
pub use model::{
    check_feasibility, fitness, solution_distance, Constraint, FeasibilityMode, FeasibilityReport,
    Instance, ModelError, Node, Request, Route, RoutedSolution, VehicleSpec,
};
