use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::chromosome::{
    decode, max_routes, random_node_chromosome, random_vehicle_chromosome, vehicle_slots,
    NodeChromosome, VehicleChromosome,
};
use super::evaluate::{sweep, with_workers, Evaluator, Score};
use super::operators::{crossover_nodes, crossover_vehicles, mutate_nodes, mutate_vehicles};
use super::{GaError, GaParams, GaResult, GenerationStats};
use crate::model::{
    fitness, geometric_fitness, solution_distance, Instance, RoutedSolution, DEPOT,
};

/// Generation `g` draws from stream `g + 1`; initialization uses stream 0.
fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

struct Best {
    score: Score,
    nodes: NodeChromosome,
    vehicles: VehicleChromosome,
}

/// Evolves both populations for `params.generations` generations and
/// returns the best solution seen. Deterministic for a given seed,
/// whatever the worker count.
pub fn run_ga(instance: &Instance, params: &GaParams) -> Result<GaResult, GaError> {
    params.validate()?;
    if instance.is_empty() {
        return Err(GaError::InvalidParams("instance has no requests".into()));
    }
    with_workers(params.workers, || evolve(instance, params))
}

fn evolve(instance: &Instance, params: &GaParams) -> Result<GaResult, GaError> {
    let n = params.population_size;
    let evaluator = Evaluator::new(instance, params);

    let mut rng = stream(params.seed, 0);
    let mut nodes: Vec<NodeChromosome> = (0..n)
        .map(|_| random_node_chromosome(instance, &mut rng))
        .collect();
    let mut vehicles: Vec<VehicleChromosome> = (0..n)
        .map(|_| random_vehicle_chromosome(instance, &mut rng))
        .collect();

    let mut best_penalized: Option<Best> = None;
    let mut best_feasible: Option<Best> = None;
    let mut history = Vec::with_capacity(params.generations);
    let mut evaluations = 0u64;

    for generation in 0..params.generations {
        let mut rng = stream(params.seed, generation as u64 + 1);
        let node_children = breed_nodes(&nodes, instance, params, &mut rng);
        let vehicle_children = breed_vehicles(&vehicles, instance, params, &mut rng);
        nodes.extend(node_children);
        vehicles.extend(vehicle_children);

        let eval = sweep(&evaluator, &nodes, &vehicles, params.workers);
        evaluations += eval.evaluations() as u64;

        let (ba, bb) = eval.best;
        if best_penalized
            .as_ref()
            .is_none_or(|b| eval.best_score.penalized < b.score.penalized)
        {
            best_penalized = Some(Best {
                score: eval.best_score,
                nodes: nodes[ba].clone(),
                vehicles: vehicles[bb].clone(),
            });
        }
        let mut feasible_here: Option<usize> = None;
        let mut sum = 0.0;
        for (i, s) in eval.scores.iter().enumerate() {
            sum += s.penalized;
            if s.feasible && feasible_here.is_none_or(|f| s.cost < eval.scores[f].cost) {
                feasible_here = Some(i);
            }
        }
        if let Some(i) = feasible_here {
            let s = eval.scores[i];
            if best_feasible.as_ref().is_none_or(|b| s.cost < b.score.cost) {
                best_feasible = Some(Best {
                    score: s,
                    nodes: nodes[i / eval.columns].clone(),
                    vehicles: vehicles[i % eval.columns].clone(),
                });
            }
        }
        history.push(GenerationStats {
            best: eval.best_score.penalized,
            mean: sum / eval.scores.len() as f64,
            feasible_found: feasible_here.is_some(),
        });

        let cols = eval.columns;
        let row_best: Vec<f64> = eval
            .scores
            .chunks(cols)
            .map(|row| {
                row.iter()
                    .map(|s| s.penalized)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let mut col_best = vec![f64::INFINITY; cols];
        for row in eval.scores.chunks(cols) {
            for (c, s) in col_best.iter_mut().zip(row) {
                *c = c.min(s.penalized);
            }
        }
        nodes = survivors(&nodes, &row_best, ba, n, params.elitism, &mut rng);
        vehicles = survivors(&vehicles, &col_best, bb, n, params.elitism, &mut rng);
    }

    let feasible = best_feasible.is_some();
    let best = best_feasible
        .or(best_penalized)
        .expect("at least one generation was evaluated");
    let solution = decode(&best.nodes, &best.vehicles);
    let best_fitness =
        fitness(&solution, instance).unwrap_or_else(|_| geometric_fitness(&solution, instance));
    let best_distance = solution_distance(&solution, instance)
        .unwrap_or_else(|_| geometric_distance(&solution, instance));
    Ok(GaResult {
        best_solution: solution,
        best_fitness,
        best_distance,
        best_penalized: best.score.penalized,
        feasible,
        history,
        evaluations,
    })
}

fn geometric_distance(solution: &RoutedSolution, instance: &Instance) -> f64 {
    solution
        .routes
        .iter()
        .filter(|r| !r.visits.is_empty())
        .map(|r| {
            let mut prev = DEPOT;
            let mut length = 0.0;
            for &node in r.visits.iter().chain(std::iter::once(&DEPOT)) {
                length += instance.geo(prev, node);
                prev = node;
            }
            length
        })
        .sum()
}

fn breed_nodes(
    pop: &[NodeChromosome],
    instance: &Instance,
    params: &GaParams,
    rng: &mut ChaCha8Rng,
) -> Vec<NodeChromosome> {
    let n = pop.len();
    let len = instance.n_prime();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = &pop[rng.gen_range(0..n)];
        let b = &pop[rng.gen_range(0..n)];
        let (c1, c2) = if len >= 2 && rng.gen_bool(params.crossover_rate) {
            crossover_nodes(a, b, rng.gen_range(1..len), instance)
        } else {
            (a.clone(), b.clone())
        };
        for child in [c1, c2] {
            if out.len() == n {
                break;
            }
            let child = if rng.gen_bool(params.mutation_rate) {
                mutate_nodes(&child, instance, rng)
            } else {
                child
            };
            out.push(child);
        }
    }
    out
}

fn breed_vehicles(
    pop: &[VehicleChromosome],
    instance: &Instance,
    params: &GaParams,
    rng: &mut ChaCha8Rng,
) -> Vec<VehicleChromosome> {
    let n = pop.len();
    let slots = vehicle_slots(instance);
    let routes = max_routes(instance);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = &pop[rng.gen_range(0..n)];
        let b = &pop[rng.gen_range(0..n)];
        let (c1, c2) = if slots >= 2 && rng.gen_bool(params.crossover_rate) {
            crossover_vehicles(a, b, rng.gen_range(1..slots), instance.n_prime(), routes)
        } else {
            (a.clone(), b.clone())
        };
        for child in [c1, c2] {
            if out.len() == n {
                break;
            }
            let child = if rng.gen_bool(params.mutation_rate) {
                mutate_vehicles(&child, routes, rng)
            } else {
                child
            };
            out.push(child);
        }
    }
    out
}

/// Rank-based survivor selection. `leader` (a member of the generation's
/// best pair) ranks first, the top `elitism` ranks survive unchanged, and
/// the remaining places are drawn without replacement with weight
/// proportional to the number of individuals ranked below. Equal scores
/// rank by index.
fn survivors<T: Clone>(
    pool: &[T],
    scores: &[f64],
    leader: usize,
    n: usize,
    elitism: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<T> {
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    if let Some(at) = order.iter().position(|&i| i == leader) {
        order[..=at].rotate_right(1);
    }

    let mut out: Vec<T> = order[..elitism].iter().map(|&i| pool[i].clone()).collect();
    let m = order.len();
    let rest = order.len() - elitism;
    let picked =
        rand::seq::index::sample_weighted(rng, rest, |r| (m - elitism - r) as f64, n - elitism)
            .expect("rank weights are positive");
    let mut picked = picked.into_vec();
    picked.sort_unstable();
    out.extend(picked.into_iter().map(|r| pool[order[elitism + r]].clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{instance, ring_instance};
    use crate::model::{check_feasibility, Route, VehicleSpec};

    #[test]
    fn single_request_optimum_in_first_generation() {
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 1000.0, 0.0, 5),
                (6.0, 8.0, 0.0, 1000.0, 0.0, -5),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(10)],
        );
        let params = GaParams {
            population_size: 4,
            generations: 1,
            ..GaParams::default()
        };
        let res = run_ga(&inst, &params).unwrap();
        assert!(res.feasible);
        assert_eq!(res.best_solution.routes, vec![Route::new(0, vec![1, 2])]);
        assert_eq!(res.best_fitness, 20.0);
        assert_eq!(res.best_distance, 20.0);
        assert!(res.history[0].feasible_found);
    }

    #[test]
    fn deterministic_and_monotone() {
        let inst = ring_instance();
        let params = GaParams {
            population_size: 12,
            generations: 15,
            seed: 5,
            ..GaParams::default()
        };
        let a = run_ga(&inst, &params).unwrap();
        let b = run_ga(&inst, &params).unwrap();
        assert_eq!(a, b);
        assert!(a.history.windows(2).all(|w| w[1].best <= w[0].best));
        assert_eq!(a.evaluations, 15 * 24 * 24);
        assert!(a.feasible);
        assert!(check_feasibility(&a.best_solution, &inst, params.mode).feasible);
        assert_eq!(a.best_fitness, fitness(&a.best_solution, &inst).unwrap());
    }

    #[test]
    fn serial_and_parallel_agree() {
        let inst = ring_instance();
        let base = GaParams {
            population_size: 10,
            generations: 5,
            seed: 3,
            ..GaParams::default()
        };
        let serial = run_ga(
            &inst,
            &GaParams {
                workers: 1,
                ..base.clone()
            },
        )
        .unwrap();
        let parallel = run_ga(&inst, &GaParams { workers: 3, ..base }).unwrap();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn impossible_windows_report_infeasible() {
        // the client window closes before the vehicle can possibly arrive
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 100.0, 0.0, 5),
                (30.0, 40.0, 0.0, 1.0, 0.0, -5),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(10)],
        );
        let res = run_ga(
            &inst,
            &GaParams {
                population_size: 4,
                generations: 3,
                ..GaParams::default()
            },
        )
        .unwrap();
        assert!(!res.feasible);
        assert!(res.best_penalized > res.best_fitness);
    }

    #[test]
    fn rejects_bad_params() {
        let inst = ring_instance();
        for p in [
            GaParams {
                population_size: 0,
                ..GaParams::default()
            },
            GaParams {
                crossover_rate: 1.5,
                ..GaParams::default()
            },
            GaParams {
                elitism: 101,
                ..GaParams::default()
            },
            GaParams {
                generations: 0,
                ..GaParams::default()
            },
        ] {
            assert!(run_ga(&inst, &p).is_err());
        }
    }

    #[test]
    fn survivor_selection_keeps_leader() {
        let mut rng = stream(0, 0);
        let pool = vec!['a', 'b', 'c', 'd'];
        let scores = [3.0, 1.0, 1.0, 2.0];
        let out = survivors(&pool, &scores, 2, 2, 1, &mut rng);
        assert_eq!(out[0], 'c');
        let out = survivors(&pool, &scores, 1, 3, 2, &mut rng);
        assert_eq!(&out[..2], &['b', 'c']);
    }
}
