//! Exhaustive reference solver for small instances.
//!
//! Everything here is written against the raw instance data: distances come
//! straight from node coordinates and the constraint checks are
//! straight-line code that shares nothing with [`crate::model`]'s checker.
//! Any disagreement between the two is a bug in one of them.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Constraint, FeasibilityMode, FeasibilityReport, Instance, Route, RoutedSolution, Violation,
};

/// Absolute slack on time comparisons.
const SLACK: f64 = 1e-6;

/// Hard ceiling on `max_nodes`.
pub const MAX_ORACLE_NODES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_nodes: usize,
    /// Vehicles considered; fleets larger than this are truncated.
    pub max_vehicles: usize,
    pub time_budget: Option<Duration>,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_nodes: 8,
            max_vehicles: 4,
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub optimum: Option<RoutedSolution>,
    pub optimal_fitness: Option<f64>,
    pub feasible_count: u64,
    pub explored_count: u64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid limits: {0}")]
    InvalidLimits(String),
    #[error("instance has {n_prime} customer nodes, limit is {max_nodes}")]
    TooLarge { n_prime: usize, max_nodes: usize },
    #[error("time budget exhausted after {explored} candidates ({feasible} feasible)")]
    OutOfTime { explored: u64, feasible: u64 },
}

/// Number of candidates `enumerate_optimal` visits: every ordering of the
/// `n` customers times every split of it into `vehicles` consecutive
/// (possibly empty) blocks.
pub fn candidate_count(n: usize, vehicles: usize) -> u64 {
    let factorial: u64 = (1..=n as u64).product();
    // C(n + v - 1, v - 1)
    let mut splits: u64 = 1;
    for i in 1..vehicles as u64 {
        splits = splits * (n as u64 + i) / i;
    }
    factorial * splits
}

/// Finds the cheapest feasible routed solution by full enumeration.
///
/// Split shapes are visited in lexicographic order of the per-vehicle
/// counts and, within a shape, orderings in lexicographic order; the first
/// minimum wins ties.
pub fn enumerate_optimal(
    instance: &Instance,
    mode: FeasibilityMode,
    limits: &OracleLimits,
) -> Result<OracleResult, OracleError> {
    if limits.max_nodes > MAX_ORACLE_NODES {
        return Err(OracleError::InvalidLimits(format!(
            "max_nodes {} exceeds {MAX_ORACLE_NODES}",
            limits.max_nodes
        )));
    }
    if limits.max_vehicles == 0 {
        return Err(OracleError::InvalidLimits(
            "max_vehicles must be positive".into(),
        ));
    }
    let n = instance.nodes().len() - 1;
    if n > limits.max_nodes {
        return Err(OracleError::TooLarge {
            n_prime: n,
            max_nodes: limits.max_nodes,
        });
    }
    let vehicles = instance.fleet().len().min(limits.max_vehicles);
    let started = Instant::now();

    let mut explored = 0u64;
    let mut feasible = 0u64;
    let mut best: Option<(f64, RoutedSolution)> = None;

    let mut shape = vec![0usize; vehicles];
    shape[vehicles - 1] = n;
    loop {
        let mut order: Vec<usize> = (1..=n).collect();
        loop {
            explored += 1;
            if explored.is_multiple_of(4096) {
                if let Some(budget) = limits.time_budget {
                    if started.elapsed() > budget {
                        return Err(OracleError::OutOfTime { explored, feasible });
                    }
                }
            }
            let candidate = split(&order, &shape);
            if cross_check(&candidate, instance, mode).feasible {
                feasible += 1;
                let cost = plain_cost(&candidate, instance);
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, candidate));
                }
            }
            if !next_permutation(&mut order) {
                break;
            }
        }
        if !next_shape(&mut shape) {
            break;
        }
    }

    let (optimal_fitness, optimum) = match best {
        Some((c, s)) => (Some(c), Some(s)),
        None => (None, None),
    };
    Ok(OracleResult {
        optimum,
        optimal_fitness,
        feasible_count: feasible,
        explored_count: explored,
    })
}

fn split(order: &[usize], shape: &[usize]) -> RoutedSolution {
    let mut routes = Vec::new();
    let mut at = 0;
    for (vehicle, &count) in shape.iter().enumerate() {
        if count > 0 {
            routes.push(Route::new(vehicle, order[at..at + count].to_vec()));
            at += count;
        }
    }
    RoutedSolution::new(routes)
}

/// Lexicographic successor among compositions with the same sum and length.
fn next_shape(shape: &mut [usize]) -> bool {
    let len = shape.len();
    if len < 2 {
        return false;
    }
    // rightmost position i < len - 1 whose suffix (after i) has a positive sum
    let mut i = len - 1;
    loop {
        if i == 0 {
            return false;
        }
        i -= 1;
        let rest: usize = shape[i + 1..].iter().sum();
        if rest > 0 {
            shape[i] += 1;
            let rest = rest - 1;
            for s in &mut shape[i + 1..] {
                *s = 0;
            }
            shape[len - 1] = rest;
            return true;
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn leg(instance: &Instance, a: usize, b: usize) -> f64 {
    let p = &instance.nodes()[a];
    let q = &instance.nodes()[b];
    (p.x - q.x).hypot(p.y - q.y)
}

fn plain_cost(solution: &RoutedSolution, instance: &Instance) -> f64 {
    let mut total = 0.0;
    for route in &solution.routes {
        if route.visits.is_empty() {
            continue;
        }
        let mut length = leg(instance, 0, route.visits[0]);
        for w in route.visits.windows(2) {
            length += leg(instance, w[0], w[1]);
        }
        length += leg(instance, *route.visits.last().unwrap(), 0);
        total += instance.fleet()[route.vehicle].cost_coefficient * length;
    }
    total
}

/// Independent feasibility verdict for differential testing.
pub fn cross_check(
    solution: &RoutedSolution,
    instance: &Instance,
    mode: FeasibilityMode,
) -> FeasibilityReport {
    let nodes = instance.nodes();
    let fleet = instance.fleet();
    let mut out: Vec<Violation> = Vec::new();
    let mut flag = |constraint, node, vehicle, magnitude| {
        out.push(Violation {
            constraint,
            node,
            vehicle,
            magnitude,
        })
    };

    // one route per vehicle, depot only at the ends, known ids
    let mut used = vec![false; fleet.len()];
    let mut usable = Vec::with_capacity(solution.routes.len());
    for route in &solution.routes {
        let mut ok = true;
        if route.vehicle >= fleet.len() {
            flag(Constraint::Depot, None, Some(route.vehicle), 1.0);
            ok = false;
        } else if used[route.vehicle] {
            flag(Constraint::Depot, None, Some(route.vehicle), 1.0);
        } else {
            used[route.vehicle] = true;
        }
        for &v in &route.visits {
            if v == 0 {
                flag(Constraint::Flow, Some(0), Some(route.vehicle), 1.0);
                ok = false;
            } else if v >= nodes.len() {
                flag(Constraint::Coverage, Some(v), Some(route.vehicle), 1.0);
                ok = false;
            }
        }
        usable.push(ok);
    }

    // each customer served exactly once
    let times_served = |id: usize| -> usize {
        solution
            .routes
            .iter()
            .map(|r| r.visits.iter().filter(|&&v| v == id).count())
            .sum()
    };
    let mut served = vec![0usize; nodes.len()];
    for (id, slot) in served.iter_mut().enumerate().skip(1) {
        *slot = times_served(id);
        if *slot == 0 {
            flag(Constraint::Coverage, Some(id), None, 1.0);
        } else if *slot > 1 {
            flag(Constraint::Coverage, Some(id), None, (*slot - 1) as f64);
        }
    }

    // (route index, position, departure)
    let mut seen_at: Vec<Option<(usize, usize, f64)>> = vec![None; nodes.len()];
    for (r, route) in solution.routes.iter().enumerate() {
        if !usable[r] || route.visits.is_empty() {
            continue;
        }
        let vehicle = &fleet[route.vehicle];
        let mut stops = vec![0];
        stops.extend_from_slice(&route.visits);
        stops.push(0);

        let mut now = 0.0;
        let mut broken = false;
        for w in 1..stops.len() {
            let (from, to) = (stops[w - 1], stops[w]);
            let blocked = instance.blocked_arcs().contains(&(from, to));
            if blocked {
                flag(Constraint::BlockedArc, Some(to), Some(route.vehicle), 1.0);
                broken = true;
            }
            let arrive = now + leg(instance, from, to) / vehicle.speed;
            let node = &nodes[to];
            if to == 0 {
                if !broken && node.window_close.is_finite() {
                    let late = arrive.max(node.window_open) + node.service_time - node.window_close;
                    if late > SLACK {
                        flag(Constraint::TimeWindow, Some(0), Some(route.vehicle), late);
                    }
                }
                break;
            }
            let finish = arrive.max(node.window_open) + node.service_time;
            if !broken && finish - node.window_close > SLACK {
                flag(
                    Constraint::TimeWindow,
                    Some(to),
                    Some(route.vehicle),
                    finish - node.window_close,
                );
                broken = true;
            }
            now = finish;
            seen_at[to] = Some((r, w - 1, finish));
        }

        let mut on_board = 0i64;
        for &v in &route.visits {
            on_board += nodes[v].quantity;
            if on_board < 0 {
                flag(
                    Constraint::Load,
                    Some(v),
                    Some(route.vehicle),
                    -on_board as f64,
                );
                break;
            } else if on_board > vehicle.capacity {
                flag(
                    Constraint::Load,
                    Some(v),
                    Some(route.vehicle),
                    (on_board - vehicle.capacity) as f64,
                );
                break;
            }
        }
    }

    for req in instance.requests() {
        if served[req.supplier] != 1 || served[req.client] != 1 {
            continue;
        }
        let (Some((rs, ps, ds)), Some((rc, pc, dc))) = (seen_at[req.supplier], seen_at[req.client])
        else {
            continue;
        };
        let vehicle = Some(solution.routes[rc].vehicle);
        if mode == FeasibilityMode::StrictPairing && !(rs == rc && ps < pc) {
            flag(Constraint::Precedence, Some(req.client), vehicle, 1.0);
        }
        if ds - dc > SLACK {
            flag(Constraint::Precedence, Some(req.client), vehicle, ds - dc);
        }
    }

    FeasibilityReport {
        feasible: out.is_empty(),
        violations: out,
    }
}
