use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pdptw_core::model::FeasibilityMode;
use pdptw_core::GaParams;

#[derive(Parser, Debug)]
#[command(
    name = "pdptw",
    version,
    about = "Pickup and delivery routing with time windows"
)]
pub struct Cli {
    /// Output style: human-readable text or one JSON record per line.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random instance that is feasible by construction.
    Generate(GenerateArgs),
    /// Run the genetic algorithm on an instance.
    Solve(SolveArgs),
    /// Check a solution against an instance.
    Validate(ValidateArgs),
    /// Solve a small instance exactly by enumeration.
    Oracle(OracleArgs),
    /// Sweep instance sizes and population sizes over several seeds.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Pairing enforced only through departure times.
    Paper,
    /// Supplier and client must share a route, supplier first.
    Strict,
}

impl From<Mode> for FeasibilityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Paper => FeasibilityMode::PaperLiteral,
            Mode::Strict => FeasibilityMode::StrictPairing,
        }
    }
}

#[derive(Args, Debug)]
pub struct SeedArg {
    /// Random seed; falls back to $PDPTW_SEED, then 0.
    #[arg(long, env = "PDPTW_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Number of customer nodes N' (even).
    #[arg(long)]
    pub n: usize,
    /// Fleet size.
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Side of the square holding the nodes.
    #[arg(long, default_value_t = 100.0)]
    pub area: f64,
    /// Capacity of every vehicle.
    #[arg(long, default_value_t = 100)]
    pub capacity: i64,
    /// Depot closing time.
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct GaArgs {
    #[arg(long, default_value_t = GaParams::default().generations)]
    pub gens: usize,
    /// Crossover probability.
    #[arg(long, default_value_t = GaParams::default().crossover_rate)]
    pub xover: f64,
    /// Mutation probability.
    #[arg(long = "mut", default_value_t = GaParams::default().mutation_rate)]
    pub mutation: f64,
    #[arg(long, default_value_t = GaParams::default().elitism)]
    pub elitism: usize,
    /// Cost per unit of violation; defaults to ten times the longest arc.
    #[arg(long)]
    pub penalty: Option<f64>,
    #[arg(long, value_enum, default_value_t = Mode::Paper)]
    pub mode: Mode,
    /// Evaluation threads; 0 uses every core, 1 the serial path.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

impl GaArgs {
    pub fn params(&self, population_size: usize, seed: u64) -> GaParams {
        GaParams {
            population_size,
            generations: self.gens,
            crossover_rate: self.xover,
            mutation_rate: self.mutation,
            elitism: self.elitism,
            seed,
            mode: self.mode.into(),
            infeasibility_penalty: self.penalty,
            workers: self.workers,
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Instance file: native JSON, or Li & Lim text when it ends in `.txt`.
    pub instance: PathBuf,
    /// Population size n.
    #[arg(long, default_value_t = GaParams::default().population_size)]
    pub pop: usize,
    #[command(flatten)]
    pub ga: GaArgs,
    #[command(flatten)]
    pub seed: SeedArg,
    /// Where to write the solution report (JSON).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Paper)]
    pub mode: Mode,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Paper)]
    pub mode: Mode,
    /// Largest N' to attempt (at most 10).
    #[arg(long, default_value_t = 8)]
    pub max_nodes: usize,
    /// Vehicles considered.
    #[arg(long, default_value_t = 4)]
    pub max_vehicles: usize,
    /// Give up after this many seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
    /// Where to write the optimum's report (JSON).
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Customer counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [20])]
    pub n: Vec<usize>,
    /// Fleet sizes to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [2])]
    pub k: Vec<usize>,
    /// Population sizes to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [100, 500])]
    pub pop: Vec<usize>,
    /// GA runs per cell, seeded `seed`, `seed + 1`, ...
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Instances generated per (N', k), seeded like the runs.
    #[arg(long, default_value_t = 1)]
    pub instances: u64,
    #[command(flatten)]
    pub ga: GaArgs,
    #[command(flatten)]
    pub seed: SeedArg,
}
