//! Random instances that are feasible by construction.
//!
//! Requests are dealt to vehicles and interleaved into a random tour per
//! vehicle that respects pairing and capacity. Driving that tour at unit
//! speed gives an arrival time for every node, and each window is then
//! placed around its arrival, so the tour itself is always a feasible
//! solution.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{round6, IoError};
use crate::model::{Instance, Node, Request, Route, RoutedSolution, VehicleSpec, DEPOT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Customer count N', even.
    pub n_prime: usize,
    /// Fleet size.
    pub k: usize,
    /// Side of the square holding all coordinates.
    pub area: f64,
    pub capacity: i64,
    pub window_width_range: (f64, f64),
    pub service_time_range: (f64, f64),
    /// Supplier quantities; the client gets the negation.
    pub quantity_range: (i64, i64),
    /// Closing time of the depot. The seeding tour may extend it when it
    /// would otherwise return late.
    pub horizon: Option<f64>,
    pub seed: u64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            n_prime: 20,
            k: 2,
            area: 100.0,
            capacity: 100,
            window_width_range: (300.0, 600.0),
            service_time_range: (1.0, 10.0),
            quantity_range: (5, 40),
            horizon: None,
            seed: 0,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), IoError> {
        let fail = |m: String| Err(IoError::Generator(m));
        if self.n_prime < 2 || !self.n_prime.is_multiple_of(2) {
            return fail(format!(
                "n_prime must be even and at least 2, got {}",
                self.n_prime
            ));
        }
        if self.k == 0 {
            return fail("fleet size must be at least 1".into());
        }
        if !(self.area.is_finite() && self.area > 0.0) {
            return fail(format!("area must be positive, got {}", self.area));
        }
        for (name, (lo, hi)) in [
            ("window_width_range", self.window_width_range),
            ("service_time_range", self.service_time_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return fail(format!(
                    "{name} must satisfy 0 <= lo <= hi, got ({lo}, {hi})"
                ));
            }
        }
        let (qlo, qhi) = self.quantity_range;
        if !(1 <= qlo && qlo <= qhi) {
            return fail(format!(
                "quantity_range must satisfy 1 <= lo <= hi, got ({qlo}, {qhi})"
            ));
        }
        if qhi > self.capacity {
            return fail(format!("quantity {qhi} exceeds capacity {}", self.capacity));
        }
        if let Some(h) = self.horizon {
            if !(h.is_finite() && h >= 0.0) {
                return fail(format!("horizon must be finite and non-negative, got {h}"));
            }
        }
        Ok(())
    }
}

/// Generates an instance from `params`.
pub fn generate_random(params: &GeneratorParams) -> Result<Instance, IoError> {
    generate_with_tour(params).map(|(inst, _)| inst)
}

/// Generates an instance together with the tour its windows were built
/// around.
pub fn generate_with_tour(params: &GeneratorParams) -> Result<(Instance, RoutedSolution), IoError> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n_prime;
    let centre = round6(params.area / 2.0);

    let mut nodes = vec![Node::depot(centre, centre)];
    let mut requests = Vec::with_capacity(n / 2);
    for r in 0..n / 2 {
        let q = rng.gen_range(params.quantity_range.0..=params.quantity_range.1);
        for quantity in [q, -q] {
            nodes.push(Node {
                id: nodes.len(),
                x: round6(rng.gen_range(0.0..=params.area)),
                y: round6(rng.gen_range(0.0..=params.area)),
                window_open: 0.0,
                window_close: f64::INFINITY,
                service_time: round6(
                    rng.gen_range(params.service_time_range.0..=params.service_time_range.1),
                ),
                quantity,
            });
        }
        requests.push(Request {
            supplier: 2 * r + 1,
            client: 2 * r + 2,
        });
    }
    let fleet = vec![
        VehicleSpec {
            capacity: params.capacity,
            cost_coefficient: 1.0,
            speed: 1.0,
        };
        params.k
    ];

    let mut assigned = vec![Vec::new(); params.k];
    for req in &requests {
        assigned[rng.gen_range(0..params.k)].push(*req);
    }
    let routes: Vec<Route> = assigned
        .iter()
        .enumerate()
        .filter(|(_, reqs)| !reqs.is_empty())
        .map(|(v, reqs)| Route::new(v, interleave(reqs, &nodes, params.capacity, &mut rng)))
        .collect();

    // Distances come from an unconstrained copy so they match the final
    // instance exactly.
    let open = Instance::new(
        nodes.clone(),
        requests.clone(),
        fleet.clone(),
        BTreeSet::new(),
    )?;
    let mut latest_return: f64 = 0.0;
    for route in &routes {
        let mut t = 0.0;
        let mut at = DEPOT;
        for &v in &route.visits {
            let arrival = t + open.geo(at, v);
            let width = rng.gen_range(params.window_width_range.0..=params.window_width_range.1);
            let slack = rng.gen_range(0.0..=width);
            let node = &mut nodes[v];
            node.window_open = floor6((arrival - slack).max(0.0), arrival);
            node.window_close = ceil6(
                (node.window_open + width).max(arrival + node.service_time),
                arrival + node.service_time,
            );
            t = arrival + node.service_time;
            at = v;
        }
        latest_return = latest_return.max(t + open.geo(at, DEPOT));
    }
    if let Some(h) = params.horizon {
        nodes[DEPOT].window_close = ceil6(h.max(latest_return), latest_return);
    }

    let instance = Instance::new(nodes, requests, fleet, BTreeSet::new())?;
    Ok((instance, RoutedSolution::new(routes)))
}

/// Random visit order over `reqs` in which every supplier precedes its
/// client and the running load never exceeds `capacity`.
fn interleave(reqs: &[Request], nodes: &[Node], capacity: i64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pending: Vec<Request> = reqs.to_vec();
    let mut onboard: Vec<Request> = Vec::new();
    let mut load = 0;
    let mut visits = Vec::with_capacity(2 * reqs.len());
    let mut moves = Vec::new();
    while !pending.is_empty() || !onboard.is_empty() {
        moves.clear();
        for (i, r) in pending.iter().enumerate() {
            if load + nodes[r.supplier].quantity <= capacity {
                moves.push((true, i));
            }
        }
        moves.extend((0..onboard.len()).map(|i| (false, i)));
        let &(pickup, i) = moves.choose(rng).expect("an empty vehicle can always load");
        if pickup {
            let r = pending.swap_remove(i);
            load += nodes[r.supplier].quantity;
            visits.push(r.supplier);
            onboard.push(r);
        } else {
            let r = onboard.swap_remove(i);
            load += nodes[r.client].quantity;
            visits.push(r.client);
        }
    }
    visits
}

/// Six-digit value no greater than `bound`.
fn floor6(v: f64, bound: f64) -> f64 {
    let mut r = (v * 1e6).floor() / 1e6;
    while r > bound {
        r = round6(r - 1e-6);
    }
    r.max(0.0)
}

/// Six-digit value no smaller than `bound`.
fn ceil6(v: f64, bound: f64) -> f64 {
    let mut r = (v * 1e6).ceil() / 1e6;
    while r < bound {
        r = round6(r + 1e-6);
    }
    r
}
