//! Problem data model.
//!
//! Node 0 is the single depot. Every other node is either a supplier
//! (positive quantity, a pickup) or a client (negative quantity, a delivery)
//! and belongs to exactly one [`Request`]. Travel times are derived from
//! Euclidean distances and the per-vehicle speed; arcs listed in
//! `blocked_arcs` do not exist.

mod feasibility;
mod schedule;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub(crate) use feasibility::{
    assess_penalized, check_precedence, geometric_fitness, trace_route, Placement, SumSink,
};
pub use feasibility::{
    check_feasibility, fitness, solution_distance, Constraint, FeasibilityMode, FeasibilityReport,
    Violation,
};
pub use schedule::{
    load_profile, propagate_schedule, LoadInfeasible, LoadProfile, Schedule, ScheduleError, Stop,
};

/// Tolerance used when comparing times against window bounds.
pub const TIME_TOLERANCE: f64 = 1e-6;

pub const DEPOT: usize = 0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("node {node} out of range (instance has {len} nodes)")]
    NodeOutOfRange { node: usize, len: usize },
    #[error("vehicle {vehicle} out of range (fleet has {len} vehicles)")]
    VehicleOutOfRange { vehicle: usize, len: usize },
    #[error("arc {from} -> {to} is blocked")]
    BlockedArc { from: usize, to: usize },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub window_open: f64,
    pub window_close: f64,
    pub service_time: f64,
    pub quantity: i64,
}

impl Node {
    /// Depot at `(x, y)` with the default unbounded window `[0, +inf)`.
    pub fn depot(x: f64, y: f64) -> Self {
        Node {
            id: DEPOT,
            x,
            y,
            window_open: 0.0,
            window_close: f64::INFINITY,
            service_time: 0.0,
            quantity: 0,
        }
    }

    pub fn is_supplier(&self) -> bool {
        self.quantity > 0
    }

    pub fn is_client(&self) -> bool {
        self.quantity < 0
    }
}

/// A supplier/client couple: goods picked up at `supplier` go to `client`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub supplier: usize,
    pub client: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleSpec {
    pub capacity: i64,
    pub cost_coefficient: f64,
    pub speed: f64,
}

impl VehicleSpec {
    /// Unit cost and unit speed, so time and cost both equal distance.
    pub fn with_capacity(capacity: i64) -> Self {
        VehicleSpec {
            capacity,
            cost_coefficient: 1.0,
            speed: 1.0,
        }
    }
}

/// Immutable problem statement.
///
/// Construction validates every structural invariant and caches the dense
/// distance matrix, so an `Instance` can be shared freely between workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    nodes: Vec<Node>,
    requests: Vec<Request>,
    fleet: Vec<VehicleSpec>,
    blocked_arcs: BTreeSet<(usize, usize)>,
    // derived
    dist: Vec<f64>,
    blocked: Vec<bool>,
    partner: Vec<usize>,
    request_of: Vec<usize>,
}

impl Instance {
    pub fn new(
        nodes: Vec<Node>,
        requests: Vec<Request>,
        fleet: Vec<VehicleSpec>,
        blocked_arcs: BTreeSet<(usize, usize)>,
    ) -> Result<Self, ModelError> {
        validate(&nodes, &requests, &fleet, &blocked_arcs)?;

        let n = nodes.len();
        let mut dist = vec![0.0; n * n];
        for (i, a) in nodes.iter().enumerate() {
            for (j, b) in nodes.iter().enumerate() {
                dist[i * n + j] = euclid(a, b);
            }
        }
        let mut blocked = vec![false; n * n];
        for &(i, j) in &blocked_arcs {
            blocked[i * n + j] = true;
        }
        let mut partner = vec![DEPOT; n];
        let mut request_of = vec![usize::MAX; n];
        for (r, req) in requests.iter().enumerate() {
            partner[req.supplier] = req.client;
            partner[req.client] = req.supplier;
            request_of[req.supplier] = r;
            request_of[req.client] = r;
        }

        Ok(Instance {
            nodes,
            requests,
            fleet,
            blocked_arcs,
            dist,
            blocked,
            partner,
            request_of,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn fleet(&self) -> &[VehicleSpec] {
        &self.fleet
    }

    pub fn blocked_arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.blocked_arcs
    }

    /// Total node count including the depot.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_prime() == 0
    }

    /// Number of non-depot nodes, N'.
    pub fn n_prime(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Fleet size, K.
    pub fn fleet_size(&self) -> usize {
        self.fleet.len()
    }

    /// The depot window when it differs from the default `[0, +inf)`.
    pub fn depot_window(&self) -> Option<(f64, f64)> {
        let d = &self.nodes[DEPOT];
        if d.window_open == 0.0 && d.window_close == f64::INFINITY {
            None
        } else {
            Some((d.window_open, d.window_close))
        }
    }

    /// Client of a supplier, or supplier of a client.
    pub fn partner(&self, node: usize) -> usize {
        self.partner[node]
    }

    /// Index into [`Instance::requests`] of the request containing `node`.
    pub fn request_of(&self, node: usize) -> usize {
        self.request_of[node]
    }

    pub fn max_capacity(&self) -> i64 {
        self.fleet.iter().map(|v| v.capacity).max().unwrap_or(0)
    }

    /// Largest finite arc length over all node pairs.
    pub fn max_distance(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Euclidean distance, or `None` if the arc is blocked.
    pub fn distance(&self, i: usize, j: usize) -> Result<Option<f64>, ModelError> {
        self.check_node(i)?;
        self.check_node(j)?;
        let idx = i * self.nodes.len() + j;
        Ok((!self.blocked[idx]).then_some(self.dist[idx]))
    }

    /// Time for vehicle `k` to go from `i` to `j`, or `None` if the arc is
    /// blocked.
    pub fn travel_time(&self, k: usize, i: usize, j: usize) -> Result<Option<f64>, ModelError> {
        let speed = self
            .fleet
            .get(k)
            .ok_or(ModelError::VehicleOutOfRange {
                vehicle: k,
                len: self.fleet.len(),
            })?
            .speed;
        Ok(self.distance(i, j)?.map(|d| d / speed))
    }

    fn check_node(&self, id: usize) -> Result<(), ModelError> {
        if id < self.nodes.len() {
            Ok(())
        } else {
            Err(ModelError::NodeOutOfRange {
                node: id,
                len: self.nodes.len(),
            })
        }
    }

    // Unchecked accessors for hot loops; callers guarantee valid ids.

    #[inline]
    pub(crate) fn geo(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.nodes.len() + j]
    }

    #[inline]
    pub(crate) fn is_blocked(&self, i: usize, j: usize) -> bool {
        self.blocked[i * self.nodes.len() + j]
    }
}

fn euclid(a: &Node, b: &Node) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidInstance(msg.into())
}

fn validate(
    nodes: &[Node],
    requests: &[Request],
    fleet: &[VehicleSpec],
    blocked_arcs: &BTreeSet<(usize, usize)>,
) -> Result<(), ModelError> {
    if nodes.is_empty() {
        return Err(invalid("instance has no depot"));
    }
    for (i, node) in nodes.iter().enumerate() {
        if node.id != i {
            return Err(invalid(format!(
                "node at position {i} has id {} (ids must be contiguous from 0)",
                node.id
            )));
        }
        if !(node.x.is_finite() && node.y.is_finite()) {
            return Err(invalid(format!("node {i} has non-finite coordinates")));
        }
        if node.window_open.is_nan() || node.window_close.is_nan() || !node.window_open.is_finite()
        {
            return Err(invalid(format!("node {i} has an undefined time window")));
        }
        if node.window_open > node.window_close {
            return Err(invalid(format!(
                "node {i} window opens at {} after it closes at {}",
                node.window_open, node.window_close
            )));
        }
        if !(node.service_time.is_finite() && node.service_time >= 0.0) {
            return Err(invalid(format!("node {i} has invalid service time")));
        }
        if i == DEPOT {
            if node.quantity != 0 {
                return Err(invalid("depot must have quantity 0"));
            }
        } else if node.quantity == 0 {
            return Err(invalid(format!(
                "node {i} has quantity 0 (neither supplier nor client)"
            )));
        }
    }

    let n_prime = nodes.len() - 1;
    if !n_prime.is_multiple_of(2) {
        return Err(invalid(format!(
            "odd number of non-depot nodes ({n_prime})"
        )));
    }
    if requests.len() != n_prime / 2 {
        return Err(invalid(format!(
            "{} requests for {n_prime} non-depot nodes (expected {})",
            requests.len(),
            n_prime / 2
        )));
    }
    let mut seen = vec![false; nodes.len()];
    for req in requests {
        for (role, id) in [("supplier", req.supplier), ("client", req.client)] {
            if id == DEPOT || id >= nodes.len() {
                return Err(invalid(format!(
                    "request {role} {id} is not a customer node"
                )));
            }
            if seen[id] {
                return Err(invalid(format!(
                    "node {id} belongs to more than one request"
                )));
            }
            seen[id] = true;
        }
        if !nodes[req.supplier].is_supplier() {
            return Err(invalid(format!(
                "supplier {} has non-positive quantity",
                req.supplier
            )));
        }
        if !nodes[req.client].is_client() {
            return Err(invalid(format!(
                "client {} has non-negative quantity",
                req.client
            )));
        }
    }

    if fleet.is_empty() {
        return Err(invalid("fleet is empty"));
    }
    for (k, v) in fleet.iter().enumerate() {
        if v.capacity <= 0 {
            return Err(invalid(format!("vehicle {k} has non-positive capacity")));
        }
        if !(v.cost_coefficient.is_finite() && v.cost_coefficient >= 0.0) {
            return Err(invalid(format!("vehicle {k} has invalid cost coefficient")));
        }
        if !(v.speed.is_finite() && v.speed > 0.0) {
            return Err(invalid(format!("vehicle {k} has non-positive speed")));
        }
    }

    for &(i, j) in blocked_arcs {
        if i >= nodes.len() || j >= nodes.len() {
            return Err(invalid(format!(
                "blocked arc ({i}, {j}) references unknown node"
            )));
        }
        if i == j {
            return Err(invalid(format!("blocked arc ({i}, {j}) is a self-loop")));
        }
    }
    Ok(())
}

/// One vehicle's tour. The depot is implicit at both ends of `visits`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Route {
    pub vehicle: usize,
    pub visits: Vec<usize>,
}

impl Route {
    pub fn new(vehicle: usize, visits: Vec<usize>) -> Self {
        Route { vehicle, visits }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutedSolution {
    pub routes: Vec<Route>,
}

impl RoutedSolution {
    pub fn new(routes: Vec<Route>) -> Self {
        RoutedSolution { routes }
    }

    /// All visits in route order.
    pub fn flatten(&self) -> Vec<usize> {
        self.routes
            .iter()
            .flat_map(|r| r.visits.iter().copied())
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Builds an instance from `(x, y, open, close, service, quantity)` rows
    /// (depot excluded) and `(supplier, client)` pairs.
    pub fn instance(
        depot: (f64, f64),
        rows: &[(f64, f64, f64, f64, f64, i64)],
        pairs: &[(usize, usize)],
        fleet: Vec<VehicleSpec>,
    ) -> Instance {
        let mut nodes = vec![Node::depot(depot.0, depot.1)];
        for (i, &(x, y, e, l, s, q)) in rows.iter().enumerate() {
            nodes.push(Node {
                id: i + 1,
                x,
                y,
                window_open: e,
                window_close: l,
                service_time: s,
                quantity: q,
            });
        }
        let requests = pairs
            .iter()
            .map(|&(supplier, client)| Request { supplier, client })
            .collect();
        Instance::new(nodes, requests, fleet, BTreeSet::new()).unwrap()
    }

    /// The ten-node layout with the couples used by the repair examples:
    /// suppliers 5, 8, 7, 3, 6 carry +20 and clients 1, 2, 9, 10, 4 carry -20.
    pub fn ring_instance() -> Instance {
        let suppliers = [5, 8, 7, 3, 6];
        let rows: Vec<_> = (1..=10)
            .map(|i| {
                let q = if suppliers.contains(&i) { 20 } else { -20 };
                let angle = i as f64;
                (
                    10.0 * angle.cos(),
                    10.0 * angle.sin(),
                    0.0,
                    10_000.0,
                    0.0,
                    q,
                )
            })
            .collect();
        instance(
            (0.0, 0.0),
            &rows,
            &[(5, 1), (8, 2), (7, 9), (3, 10), (6, 4)],
            vec![VehicleSpec::with_capacity(60); 5],
        )
    }
}
