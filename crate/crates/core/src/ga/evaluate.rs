//! Scoring of decoded chromosome pairs and the full population sweep.

use super::chromosome::{decode, NodeChromosome, VehicleChromosome};
use super::GaParams;
use crate::model::{
    assess_penalized, check_precedence, trace_route, FeasibilityMode, Instance, Placement,
    RoutedSolution, SumSink,
};

/// Score of one decoded pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Score {
    /// Cost plus penalty times the summed violation magnitudes.
    pub penalized: f64,
    /// Cost-weighted length, blocked legs priced at their geometric length.
    pub cost: f64,
    pub feasible: bool,
}

/// Penalty per unit of violation magnitude when none is configured: ten
/// times the longest arc in the instance.
pub fn default_penalty(instance: &Instance) -> f64 {
    10.0 * instance.max_distance()
}

/// Cost plus `infeasibility_penalty` times the summed violation magnitudes.
/// Equals the plain cost for feasible solutions.
pub fn penalized_fitness(solution: &RoutedSolution, instance: &Instance, params: &GaParams) -> f64 {
    let penalty = params
        .infeasibility_penalty
        .unwrap_or_else(|| default_penalty(instance));
    score_solution(solution, instance, params.mode, penalty).penalized
}

fn score_solution(
    solution: &RoutedSolution,
    instance: &Instance,
    mode: FeasibilityMode,
    penalty: f64,
) -> Score {
    let (cost, sink) = assess_penalized(solution, instance, mode);
    Score {
        penalized: cost + penalty * sink.total,
        cost,
        feasible: sink.count == 0,
    }
}

/// Per-worker buffer reused across [`Evaluator::score`] calls.
#[derive(Debug, Clone)]
pub struct Scratch(Vec<Option<Placement>>);

/// Allocation-free scorer for `(node, vehicle)` chromosome pairs.
///
/// Walks the decoded routes in place and gives bit-identical results to
/// `penalized_fitness(decode(a, b))`.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    mode: FeasibilityMode,
    penalty: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance, params: &GaParams) -> Self {
        Evaluator {
            instance,
            mode: params.mode,
            penalty: params
                .infeasibility_penalty
                .unwrap_or_else(|| default_penalty(instance)),
        }
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn scratch(&self) -> Scratch {
        Scratch(vec![None; self.instance.len()])
    }

    pub fn score(
        &self,
        nodes: &NodeChromosome,
        vehicles: &VehicleChromosome,
        scratch: &mut Scratch,
    ) -> Score {
        let scratch = &mut scratch.0;
        let inst = self.instance;
        // Chromosomes outside the closure invariants take the general path.
        if vehicles.used_slots() > inst.fleet_size() || vehicles.total() != nodes.len() {
            return score_solution(&decode(nodes, vehicles), inst, self.mode, self.penalty);
        }
        let mut sink = SumSink::default();
        let mut cost = 0.0;
        let mut offset = 0;
        let mut route = 0;
        for &count in vehicles.counts() {
            if count == 0 {
                continue;
            }
            let visits = &nodes.0[offset..offset + count];
            let length = trace_route(inst, route, route, visits, scratch, &mut sink);
            cost += inst.fleet()[route].cost_coefficient * length;
            offset += count;
            route += 1;
        }
        check_precedence(inst, self.mode, scratch, &mut sink);
        Score {
            penalized: cost + self.penalty * sink.total,
            cost,
            feasible: sink.count == 0,
        }
    }
}

/// Outcome of one cross-product sweep.
#[derive(Debug, Clone)]
pub struct GenerationEvaluation {
    /// Row-major scores: entry `a * vehicles.len() + b` scores pair `(a, b)`.
    pub scores: Vec<Score>,
    pub columns: usize,
    /// Lowest penalized score, ties to the lowest row-major index.
    pub best: (usize, usize),
    pub best_score: Score,
}

impl GenerationEvaluation {
    pub fn evaluations(&self) -> usize {
        self.scores.len()
    }

    pub fn score(&self, a: usize, b: usize) -> Score {
        self.scores[a * self.columns + b]
    }
}

/// Scores every `(node, vehicle)` pair of the two populations.
pub fn evaluate_generation(
    p_nodes: &[NodeChromosome],
    p_vehicles: &[VehicleChromosome],
    instance: &Instance,
    params: &GaParams,
) -> GenerationEvaluation {
    let evaluator = Evaluator::new(instance, params);
    with_workers(params.workers, || {
        sweep(&evaluator, p_nodes, p_vehicles, params.workers)
    })
}

pub(crate) fn sweep(
    evaluator: &Evaluator<'_>,
    p_nodes: &[NodeChromosome],
    p_vehicles: &[VehicleChromosome],
    workers: usize,
) -> GenerationEvaluation {
    let columns = p_vehicles.len();
    let empty = Score {
        penalized: 0.0,
        cost: 0.0,
        feasible: false,
    };
    let mut scores = vec![empty; p_nodes.len() * columns];
    if columns > 0 {
        fill_rows(evaluator, p_nodes, p_vehicles, &mut scores, workers);
    }

    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.penalized < scores[best].penalized {
            best = i;
        }
    }
    GenerationEvaluation {
        best: (best / columns.max(1), best % columns.max(1)),
        best_score: scores.get(best).copied().unwrap_or(empty),
        scores,
        columns,
    }
}

fn fill_row(
    evaluator: &Evaluator<'_>,
    nodes: &NodeChromosome,
    p_vehicles: &[VehicleChromosome],
    row: &mut [Score],
    scratch: &mut Scratch,
) {
    for (slot, vehicles) in row.iter_mut().zip(p_vehicles) {
        *slot = evaluator.score(nodes, vehicles, scratch);
    }
}

#[cfg(feature = "parallel")]
fn fill_rows(
    evaluator: &Evaluator<'_>,
    p_nodes: &[NodeChromosome],
    p_vehicles: &[VehicleChromosome],
    scores: &mut [Score],
    workers: usize,
) {
    use rayon::prelude::*;

    if workers == 1 {
        return fill_rows_serial(evaluator, p_nodes, p_vehicles, scores);
    }
    scores
        .par_chunks_mut(p_vehicles.len())
        .zip(p_nodes.par_iter())
        .for_each_init(
            || evaluator.scratch(),
            |scratch, (row, nodes)| fill_row(evaluator, nodes, p_vehicles, row, scratch),
        );
}

#[cfg(not(feature = "parallel"))]
fn fill_rows(
    evaluator: &Evaluator<'_>,
    p_nodes: &[NodeChromosome],
    p_vehicles: &[VehicleChromosome],
    scores: &mut [Score],
    _workers: usize,
) {
    fill_rows_serial(evaluator, p_nodes, p_vehicles, scores)
}

fn fill_rows_serial(
    evaluator: &Evaluator<'_>,
    p_nodes: &[NodeChromosome],
    p_vehicles: &[VehicleChromosome],
    scores: &mut [Score],
) {
    let mut scratch = evaluator.scratch();
    for (row, nodes) in scores.chunks_mut(p_vehicles.len()).zip(p_nodes) {
        fill_row(evaluator, nodes, p_vehicles, row, &mut scratch);
    }
}

/// Runs `f` on a pool of `workers` threads; `0` uses the global pool and `1`
/// stays on the calling thread.
#[cfg(feature = "parallel")]
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers <= 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn with_workers<T: Send>(_workers: usize, f: impl FnOnce() -> T + Send) -> T {
    f()
}
