//! Solution reports: a JSON document (`.sol.json`) and a plain-text summary.
//!
//! Timing in a report is computed leniently so that infeasible solutions
//! still get a full listing: a late stop keeps its late times and a blocked
//! leg is driven at its straight-line length. The feasibility verdict and
//! violation list sit alongside.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::model::{
    check_feasibility, FeasibilityMode, Instance, ModelError, Route, RoutedSolution, Violation,
    DEPOT,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopReport {
    pub arrival: f64,
    pub departure: f64,
    /// Load on board after service.
    pub load: i64,
    pub node: usize,
    pub wait: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteReport {
    pub distance: f64,
    /// Depot departure, customer stops, depot return.
    pub stops: Vec<StopReport>,
    pub vehicle: usize,
}

impl RouteReport {
    pub fn visits(&self) -> Vec<usize> {
        let n = self.stops.len();
        self.stops
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != 0 && i + 1 != n)
            .map(|(_, s)| s.node)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub feasible: bool,
    pub fitness: f64,
    pub mode: FeasibilityMode,
    pub routes: Vec<RouteReport>,
    pub total_distance: f64,
    pub violations: Vec<Violation>,
}

impl SolutionReport {
    /// Fails only when a route names a node or vehicle the instance lacks.
    pub fn build(
        solution: &RoutedSolution,
        instance: &Instance,
        mode: FeasibilityMode,
    ) -> Result<Self, ModelError> {
        let mut routes = Vec::with_capacity(solution.routes.len());
        let mut total_distance = 0.0;
        let mut fitness = 0.0;
        for route in &solution.routes {
            let vehicle =
                instance
                    .fleet()
                    .get(route.vehicle)
                    .ok_or(ModelError::VehicleOutOfRange {
                        vehicle: route.vehicle,
                        len: instance.fleet_size(),
                    })?;
            let mut stops = vec![StopReport {
                arrival: 0.0,
                departure: 0.0,
                load: 0,
                node: DEPOT,
                wait: 0.0,
            }];
            let (mut at, mut clock, mut load, mut distance) = (DEPOT, 0.0, 0, 0.0);
            for &node in route.visits.iter().chain([&DEPOT]) {
                if node >= instance.len() {
                    return Err(ModelError::NodeOutOfRange {
                        node,
                        len: instance.len(),
                    });
                }
                let leg = instance.geo(at, node);
                distance += leg;
                let arrival = clock + leg / vehicle.speed;
                let stop = if node == DEPOT {
                    StopReport {
                        arrival,
                        departure: arrival,
                        load,
                        node,
                        wait: 0.0,
                    }
                } else {
                    let n = instance.node(node);
                    let start = arrival.max(n.window_open);
                    load += n.quantity;
                    StopReport {
                        arrival,
                        departure: start + n.service_time,
                        load,
                        node,
                        wait: start - arrival,
                    }
                };
                clock = stop.departure;
                at = node;
                stops.push(stop);
            }
            if route.visits.is_empty() {
                distance = 0.0;
                stops[1].arrival = 0.0;
                stops[1].departure = 0.0;
            }
            total_distance += distance;
            fitness += vehicle.cost_coefficient * distance;
            routes.push(RouteReport {
                distance,
                stops,
                vehicle: route.vehicle,
            });
        }
        let verdict = check_feasibility(solution, instance, mode);
        Ok(SolutionReport {
            feasible: verdict.feasible,
            fitness,
            mode,
            routes,
            total_distance,
            violations: verdict.violations,
        })
    }

    pub fn solution(&self) -> RoutedSolution {
        RoutedSolution::new(
            self.routes
                .iter()
                .map(|r| Route::new(r.vehicle, r.visits()))
                .collect(),
        )
    }
}

pub fn write_solution(report: &SolutionReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("reports always serialize");
    text.push('\n');
    text
}

#[derive(Deserialize)]
struct LooseSolution {
    routes: Vec<LooseRoute>,
}

#[derive(Deserialize)]
struct LooseRoute {
    vehicle: usize,
    #[serde(default)]
    stops: Option<Vec<LooseStop>>,
    #[serde(default)]
    visits: Option<Vec<usize>>,
}

#[derive(Deserialize)]
struct LooseStop {
    node: usize,
}

/// Reads the routes of a solution document. Besides full reports, a route
/// may list its customers directly as `{"vehicle": 0, "visits": [1, 2]}`.
pub fn parse_solution(text: &str) -> Result<RoutedSolution, IoError> {
    let doc: LooseSolution = serde_json::from_str(text)?;
    let mut routes = Vec::with_capacity(doc.routes.len());
    for (i, r) in doc.routes.into_iter().enumerate() {
        let visits = match (r.stops, r.visits) {
            (Some(stops), None) => {
                let n = stops.len();
                if n < 2 || stops[0].node != DEPOT || stops[n - 1].node != DEPOT {
                    return Err(ModelError::InvalidInstance(format!(
                        "route {i}: stops must start and end at the depot"
                    ))
                    .into());
                }
                stops[1..n - 1].iter().map(|s| s.node).collect()
            }
            (None, Some(visits)) => visits,
            _ => {
                return Err(ModelError::InvalidInstance(format!(
                    "route {i}: give exactly one of `stops` and `visits`"
                ))
                .into())
            }
        };
        routes.push(Route::new(r.vehicle, visits));
    }
    Ok(RoutedSolution::new(routes))
}

pub fn render_text(report: &SolutionReport) -> String {
    let mut out = String::new();
    for (i, route) in report.routes.iter().enumerate() {
        let path: Vec<String> = route.stops.iter().map(|s| s.node.to_string()).collect();
        let _ = writeln!(
            out,
            "route {} (vehicle {}): {}  distance {:.6}",
            i + 1,
            route.vehicle,
            path.join(" -> "),
            route.distance
        );
        let _ = writeln!(
            out,
            "  {:>6} {:>14} {:>14} {:>12} {:>6}",
            "node", "arrival", "departure", "wait", "load"
        );
        for s in &route.stops {
            let _ = writeln!(
                out,
                "  {:>6} {:>14.6} {:>14.6} {:>12.6} {:>6}",
                s.node, s.arrival, s.departure, s.wait, s.load
            );
        }
    }
    let _ = writeln!(out, "total distance {:.6}", report.total_distance);
    let _ = writeln!(out, "fitness {:.6}", report.fitness);
    let _ = writeln!(
        out,
        "feasible {}",
        if report.feasible { "yes" } else { "no" }
    );
    for v in &report.violations {
        let _ = write!(out, "  {}", v.constraint);
        if let Some(n) = v.node {
            let _ = write!(out, " node {n}");
        }
        if let Some(k) = v.vehicle {
            let _ = write!(out, " vehicle {k}");
        }
        let _ = writeln!(out, " magnitude {}", v.magnitude);
    }
    out
}
