//! Dual-population genetic algorithm.
//!
//! One population holds visit orders over all customers
//! ([`NodeChromosome`]), the other holds per-vehicle visit counts
//! ([`VehicleChromosome`]). A solution is a pair of one of each, decoded by
//! cutting the visit order into consecutive routes. Every generation both
//! populations are doubled with offspring and the full cross product of the
//! two is scored, so a generation with population size `n` costs exactly
//! `(2n)^2` evaluations.

mod chromosome;
mod engine;
mod evaluate;
mod operators;
mod repair;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{FeasibilityMode, RoutedSolution};

pub use chromosome::{
    decode, max_routes, random_node_chromosome, random_vehicle_chromosome, vehicle_slots,
    NodeChromosome, VehicleChromosome,
};
pub use engine::run_ga;
pub use evaluate::{
    default_penalty, evaluate_generation, penalized_fitness, Evaluator, GenerationEvaluation,
    Score, Scratch,
};
pub use operators::{
    crossover_nodes, crossover_vehicles, mutate_nodes, mutate_vehicles, normalize_counts,
    order_crossover, swap_mutation,
};
pub use repair::{repair_capacity, repair_precedence};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaError {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    /// Individuals per population, `n`.
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Best individuals of each population carried over unchanged.
    pub elitism: usize,
    pub seed: u64,
    pub mode: FeasibilityMode,
    /// Cost per unit of violation magnitude; `None` uses
    /// [`default_penalty`].
    pub infeasibility_penalty: Option<f64>,
    /// Threads for the evaluation sweep: 0 for the global pool, 1 for the
    /// serial path.
    pub workers: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        GaParams {
            population_size: 100,
            generations: 50,
            crossover_rate: 0.9,
            mutation_rate: 0.9,
            elitism: 1,
            seed: 0,
            mode: FeasibilityMode::PaperLiteral,
            infeasibility_penalty: None,
            workers: 0,
        }
    }
}

impl GaParams {
    pub fn validate(&self) -> Result<(), GaError> {
        let fail = |m: &str| Err(GaError::InvalidParams(m.to_string()));
        if self.population_size == 0 {
            return fail("population size must be at least 1");
        }
        if self.generations == 0 {
            return fail("at least one generation is required");
        }
        for (name, r) in [
            ("crossover", self.crossover_rate),
            ("mutation", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&r) {
                return Err(GaError::InvalidParams(format!(
                    "{name} rate {r} outside [0, 1]"
                )));
            }
        }
        if self.elitism > self.population_size {
            return fail("elitism cannot exceed the population size");
        }
        if let Some(p) = self.infeasibility_penalty {
            if !(p.is_finite() && p >= 0.0) {
                return fail("penalty must be a finite non-negative number");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    /// Lowest penalized score in this generation's sweep.
    pub best: f64,
    /// Mean penalized score over the sweep.
    pub mean: f64,
    pub feasible_found: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    /// Cheapest feasible solution seen, or the best penalized one when no
    /// feasible solution was ever evaluated.
    pub best_solution: RoutedSolution,
    pub best_fitness: f64,
    pub best_distance: f64,
    pub best_penalized: f64,
    pub feasible: bool,
    pub history: Vec<GenerationStats>,
    pub evaluations: u64,
}
