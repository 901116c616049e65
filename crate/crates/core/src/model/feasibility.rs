use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Instance, ModelError, RoutedSolution, DEPOT, TIME_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Constraint {
    /// Node missing, duplicated, or unknown.
    Coverage,
    /// Vehicle used by more than one route, or not in the fleet.
    Depot,
    /// Depot visited in the middle of a tour.
    Flow,
    Load,
    Precedence,
    TimeWindow,
    BlockedArc,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Constraint::Coverage => "COVERAGE",
            Constraint::Depot => "DEPOT",
            Constraint::Flow => "FLOW",
            Constraint::Load => "LOAD",
            Constraint::Precedence => "PRECEDENCE",
            Constraint::TimeWindow => "TIME_WINDOW",
            Constraint::BlockedArc => "BLOCKED_ARC",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub node: Option<usize>,
    pub vehicle: Option<usize>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        FeasibilityReport {
            feasible: violations.is_empty(),
            violations,
        }
    }

    pub fn total_magnitude(&self) -> f64 {
        self.violations.iter().map(|v| v.magnitude).sum()
    }

    pub fn has(&self, constraint: Constraint) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

/// How the supplier-before-client rule is read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeasibilityMode {
    /// Supplier departure time must not exceed client departure time,
    /// wherever in the fleet the two are served.
    #[default]
    PaperLiteral,
    /// Additionally, supplier and client share a route with the supplier
    /// visited first.
    StrictPairing,
}

pub(crate) trait ViolationSink {
    fn record(
        &mut self,
        constraint: Constraint,
        node: Option<usize>,
        vehicle: Option<usize>,
        magnitude: f64,
    );
}

impl ViolationSink for Vec<Violation> {
    fn record(
        &mut self,
        constraint: Constraint,
        node: Option<usize>,
        vehicle: Option<usize>,
        magnitude: f64,
    ) {
        self.push(Violation {
            constraint,
            node,
            vehicle,
            magnitude,
        });
    }
}

/// Accumulates magnitudes in recording order without storing violations.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct SumSink {
    pub count: usize,
    pub total: f64,
}

impl ViolationSink for SumSink {
    #[inline]
    fn record(&mut self, _: Constraint, _: Option<usize>, _: Option<usize>, magnitude: f64) {
        self.count += 1;
        self.total += magnitude;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Placement {
    pub route: usize,
    pub vehicle: usize,
    pub position: usize,
    pub departure: f64,
}

/// Walks one route, recording blocked legs, the first window miss and the
/// first load excursion, and writes each node's placement. Timing continues
/// past failures (using geometric travel times) so departure times stay
/// defined for the precedence check. Returns the route's geometric length.
///
/// Visits must be valid customer ids and `vehicle` a valid fleet index.
#[inline]
pub(crate) fn trace_route<S: ViolationSink>(
    instance: &Instance,
    route: usize,
    vehicle: usize,
    visits: &[usize],
    placements: &mut [Option<Placement>],
    sink: &mut S,
) -> f64 {
    if visits.is_empty() {
        return 0.0;
    }
    let spec = &instance.fleet[vehicle];
    let mut timing_ok = true;
    let mut prev = DEPOT;
    let mut clock = 0.0;
    let mut length = 0.0;
    for (position, &node) in visits.iter().enumerate() {
        let leg = instance.geo(prev, node);
        length += leg;
        if instance.is_blocked(prev, node) {
            sink.record(Constraint::BlockedArc, Some(node), Some(vehicle), 1.0);
            timing_ok = false;
        }
        let n = &instance.nodes[node];
        let arrival = clock + leg / spec.speed;
        let service_start = if arrival < n.window_open {
            n.window_open
        } else {
            arrival
        };
        let departure = service_start + n.service_time;
        if timing_ok {
            let lateness = departure - n.window_close;
            if lateness > TIME_TOLERANCE {
                sink.record(Constraint::TimeWindow, Some(node), Some(vehicle), lateness);
                timing_ok = false;
            }
        }
        placements[node] = Some(Placement {
            route,
            vehicle,
            position,
            departure,
        });
        clock = departure;
        prev = node;
    }
    let leg = instance.geo(prev, DEPOT);
    length += leg;
    if instance.is_blocked(prev, DEPOT) {
        sink.record(Constraint::BlockedArc, Some(DEPOT), Some(vehicle), 1.0);
    } else if timing_ok {
        let depot = &instance.nodes[DEPOT];
        if depot.window_close.is_finite() {
            let arrival = clock + leg / spec.speed;
            let start = if arrival < depot.window_open {
                depot.window_open
            } else {
                arrival
            };
            let lateness = start + depot.service_time - depot.window_close;
            if lateness > TIME_TOLERANCE {
                sink.record(Constraint::TimeWindow, Some(DEPOT), Some(vehicle), lateness);
            }
        }
    }

    let mut load = 0i64;
    for &node in visits {
        load += instance.nodes[node].quantity;
        if load < 0 {
            sink.record(Constraint::Load, Some(node), Some(vehicle), (-load) as f64);
            break;
        }
        if load > spec.capacity {
            sink.record(
                Constraint::Load,
                Some(node),
                Some(vehicle),
                (load - spec.capacity) as f64,
            );
            break;
        }
    }
    length
}

/// Checks every request whose two nodes both have a placement.
#[inline]
pub(crate) fn check_precedence<S: ViolationSink>(
    instance: &Instance,
    mode: FeasibilityMode,
    placements: &[Option<Placement>],
    sink: &mut S,
) {
    for req in &instance.requests {
        let (Some(s), Some(c)) = (placements[req.supplier], placements[req.client]) else {
            continue;
        };
        if mode == FeasibilityMode::StrictPairing && (s.route != c.route || s.position > c.position)
        {
            sink.record(
                Constraint::Precedence,
                Some(req.client),
                Some(c.vehicle),
                1.0,
            );
        }
        let gap = s.departure - c.departure;
        if gap > TIME_TOLERANCE {
            sink.record(
                Constraint::Precedence,
                Some(req.client),
                Some(c.vehicle),
                gap,
            );
        }
    }
}

/// Runs every check and returns the cost-weighted geometric length of all
/// traceable routes. Malformed routes (unknown vehicle, depot or unknown ids
/// among the visits) are reported and excluded from timing and cost.
pub(crate) fn assess<S: ViolationSink>(
    solution: &RoutedSolution,
    instance: &Instance,
    mode: FeasibilityMode,
    sink: &mut S,
) -> f64 {
    let n = instance.len();
    let k = instance.fleet_size();
    let mut counts = vec![0usize; n];
    let mut uses = vec![0usize; k];
    let mut traceable = vec![true; solution.routes.len()];

    for (r, route) in solution.routes.iter().enumerate() {
        let vehicle = route.vehicle;
        if vehicle >= k {
            sink.record(Constraint::Depot, None, Some(vehicle), 1.0);
            traceable[r] = false;
        } else {
            uses[vehicle] += 1;
            if uses[vehicle] > 1 {
                sink.record(Constraint::Depot, None, Some(vehicle), 1.0);
            }
        }
        for &node in &route.visits {
            if node == DEPOT {
                sink.record(Constraint::Flow, Some(DEPOT), Some(vehicle), 1.0);
                traceable[r] = false;
            } else if node >= n {
                sink.record(Constraint::Coverage, Some(node), Some(vehicle), 1.0);
                traceable[r] = false;
            } else {
                counts[node] += 1;
            }
        }
    }
    for (node, &c) in counts.iter().enumerate().skip(1) {
        if c != 1 {
            let magnitude = if c == 0 { 1.0 } else { (c - 1) as f64 };
            sink.record(Constraint::Coverage, Some(node), None, magnitude);
        }
    }

    let mut placements = vec![None; n];
    let mut cost = 0.0;
    for (r, route) in solution.routes.iter().enumerate() {
        if !traceable[r] {
            continue;
        }
        let length = trace_route(
            instance,
            r,
            route.vehicle,
            &route.visits,
            &mut placements,
            sink,
        );
        cost += instance.fleet[route.vehicle].cost_coefficient * length;
    }
    for (node, &c) in counts.iter().enumerate() {
        if c != 1 {
            placements[node] = None;
        }
    }
    check_precedence(instance, mode, &placements, sink);
    cost
}

/// Full feasibility verdict. Never fails: malformed solutions produce
/// violations instead of errors.
pub fn check_feasibility(
    solution: &RoutedSolution,
    instance: &Instance,
    mode: FeasibilityMode,
) -> FeasibilityReport {
    let mut violations = Vec::new();
    assess(solution, instance, mode, &mut violations);
    FeasibilityReport::from_violations(violations)
}

/// Cost (blocked legs priced at their geometric length, malformed routes
/// excluded) together with the summed violations.
pub(crate) fn assess_penalized(
    solution: &RoutedSolution,
    instance: &Instance,
    mode: FeasibilityMode,
) -> (f64, SumSink) {
    let mut sink = SumSink::default();
    let cost = assess(solution, instance, mode, &mut sink);
    (cost, sink)
}

pub(crate) fn geometric_fitness(solution: &RoutedSolution, instance: &Instance) -> f64 {
    assess_penalized(solution, instance, FeasibilityMode::PaperLiteral).0
}

fn route_lengths(solution: &RoutedSolution, instance: &Instance) -> Result<Vec<f64>, ModelError> {
    solution
        .routes
        .iter()
        .map(|route| {
            if route.vehicle >= instance.fleet_size() {
                return Err(ModelError::VehicleOutOfRange {
                    vehicle: route.vehicle,
                    len: instance.fleet_size(),
                });
            }
            if route.visits.is_empty() {
                return Ok(0.0);
            }
            let mut length = 0.0;
            let mut prev = DEPOT;
            for &node in route.visits.iter().chain(std::iter::once(&DEPOT)) {
                length += instance
                    .distance(prev, node)?
                    .ok_or(ModelError::BlockedArc {
                        from: prev,
                        to: node,
                    })?;
                prev = node;
            }
            Ok(length)
        })
        .collect()
}

/// Total travelled length of all routes, depot to depot.
pub fn solution_distance(
    solution: &RoutedSolution,
    instance: &Instance,
) -> Result<f64, ModelError> {
    Ok(route_lengths(solution, instance)?
        .into_iter()
        .fold(0.0, |acc, d| acc + d))
}

/// Transport cost: each route's length weighted by its vehicle's cost
/// coefficient.
pub fn fitness(solution: &RoutedSolution, instance: &Instance) -> Result<f64, ModelError> {
    let lengths = route_lengths(solution, instance)?;
    Ok(solution
        .routes
        .iter()
        .zip(lengths)
        .fold(0.0, |acc, (route, d)| {
            acc + instance.fleet[route.vehicle].cost_coefficient * d
        }))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::{instance, ring_instance};
    use super::super::{Route, VehicleSpec};
    use super::*;

    fn sol(routes: &[(usize, &[usize])]) -> RoutedSolution {
        RoutedSolution::new(
            routes
                .iter()
                .map(|&(v, r)| Route::new(v, r.to_vec()))
                .collect(),
        )
    }

    #[test]
    fn two_route_assignment_overdraws_second_vehicle() {
        let inst = ring_instance();
        let s = sol(&[(0, &[5, 8, 2, 6, 4, 3]), (1, &[10, 7, 9, 1])]);
        for mode in [
            FeasibilityMode::PaperLiteral,
            FeasibilityMode::StrictPairing,
        ] {
            let report = check_feasibility(&s, &inst, mode);
            assert!(!report.feasible);
            let load: Vec<_> = report
                .violations
                .iter()
                .filter(|v| v.constraint == Constraint::Load)
                .collect();
            assert_eq!(load.len(), 1);
            assert_eq!(load[0].vehicle, Some(1));
            assert_eq!(load[0].node, Some(10));
            assert_eq!(load[0].magnitude, 20.0);
        }
    }

    #[test]
    fn supplier_then_client_is_feasible() {
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 50.0, 1.0, 10),
                (6.0, 8.0, 0.0, 50.0, 1.0, -10),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(10)],
        );
        let s = sol(&[(0, &[1, 2])]);
        for mode in [
            FeasibilityMode::PaperLiteral,
            FeasibilityMode::StrictPairing,
        ] {
            assert!(check_feasibility(&s, &inst, mode).feasible);
        }
    }

    #[test]
    fn cross_route_departure_order() {
        // supplier 1 waits until 10; client 2 is served at 5 on another vehicle.
        // Each route pairs one client with the other route's supplier, keeping
        // loads non-negative.
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 10.0, 50.0, 0.0, 10),
                (0.0, 0.0, 0.0, 50.0, 5.0, -10),
                (0.0, 0.0, 0.0, 50.0, 0.0, 10),
                (0.0, 0.0, 0.0, 50.0, 0.0, -10),
            ],
            &[(1, 2), (3, 4)],
            vec![VehicleSpec::with_capacity(20); 2],
        );
        let s = sol(&[(0, &[1, 4]), (1, &[3, 2])]);
        let report = check_feasibility(&s, &inst, FeasibilityMode::PaperLiteral);
        let prec: Vec<_> = report
            .violations
            .iter()
            .filter(|v| v.constraint == Constraint::Precedence)
            .collect();
        assert_eq!(prec.len(), 1);
        assert_eq!(prec[0].node, Some(2));
        assert!((prec[0].magnitude - 5.0).abs() < 1e-12);

        // Once the supplier departs before the client, the literal reading is
        // satisfied but strict pairing still rejects the split.
        let s = sol(&[(0, &[1, 4]), (1, &[3, 2])]);
        let mut nodes = inst.nodes().to_vec();
        nodes[2].window_open = 20.0;
        let inst = Instance::new(
            nodes,
            inst.requests().to_vec(),
            inst.fleet().to_vec(),
            Default::default(),
        )
        .unwrap();
        assert!(check_feasibility(&s, &inst, FeasibilityMode::PaperLiteral).feasible);
        let strict = check_feasibility(&s, &inst, FeasibilityMode::StrictPairing);
        assert!(strict.has(Constraint::Precedence));
    }

    #[test]
    fn structural_violations() {
        let inst = ring_instance();
        let dup = sol(&[(0, &[5, 1, 5]), (0, &[8, 2, 7, 9, 3, 10, 6, 4])]);
        let report = check_feasibility(&dup, &inst, FeasibilityMode::PaperLiteral);
        assert!(report.has(Constraint::Coverage));
        assert!(report.has(Constraint::Depot));

        let flow = sol(&[(0, &[5, 1, 0, 8, 2]), (1, &[7, 9, 3, 10, 6, 4])]);
        let report = check_feasibility(&flow, &inst, FeasibilityMode::PaperLiteral);
        assert!(report.has(Constraint::Flow));

        let missing = sol(&[(0, &[5, 1])]);
        let report = check_feasibility(&missing, &inst, FeasibilityMode::PaperLiteral);
        let cov = report
            .violations
            .iter()
            .filter(|v| v.constraint == Constraint::Coverage)
            .count();
        assert_eq!(cov, 8);

        let unknown = sol(&[(9, &[5, 1]), (0, &[99])]);
        let report = check_feasibility(&unknown, &inst, FeasibilityMode::PaperLiteral);
        assert!(report.has(Constraint::Depot));
        assert!(report.has(Constraint::Coverage));
    }

    #[test]
    fn blocked_arc_is_reported() {
        let base = ring_instance();
        let inst = Instance::new(
            base.nodes().to_vec(),
            base.requests().to_vec(),
            base.fleet().to_vec(),
            [(1, 0)].into_iter().collect(),
        )
        .unwrap();
        let s = sol(&[(0, &[5, 8, 7, 3, 6, 10, 4, 9, 2, 1])]);
        let report = check_feasibility(&s, &inst, FeasibilityMode::PaperLiteral);
        assert!(report.has(Constraint::BlockedArc));
        assert!(solution_distance(&s, &inst).is_err());
        assert!(fitness(&s, &inst).is_err());
    }

    #[test]
    fn distance_and_fitness_sums() {
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 100.0, 0.0, 1),
                (3.0, 4.0, 0.0, 100.0, 0.0, -1),
                (6.0, 8.0, 0.0, 100.0, 0.0, 1),
                (6.0, 8.0, 0.0, 100.0, 0.0, -1),
            ],
            &[(1, 2), (3, 4)],
            vec![
                VehicleSpec {
                    capacity: 5,
                    cost_coefficient: 2.0,
                    speed: 1.0,
                },
                VehicleSpec {
                    capacity: 5,
                    cost_coefficient: 3.0,
                    speed: 1.0,
                },
            ],
        );
        let one = sol(&[(0, &[1, 2])]);
        assert_eq!(solution_distance(&one, &inst).unwrap(), 10.0);
        let two = sol(&[(0, &[1, 2]), (1, &[3, 4])]);
        assert_eq!(solution_distance(&two, &inst).unwrap(), 30.0);
        assert_eq!(fitness(&two, &inst).unwrap(), 2.0 * 10.0 + 3.0 * 20.0);
        let empty = sol(&[(0, &[]), (1, &[])]);
        assert_eq!(solution_distance(&empty, &inst).unwrap(), 0.0);
        assert_eq!(geometric_fitness(&two, &inst), 80.0);
    }

    #[test]
    fn zero_cost_coefficients() {
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 100.0, 0.0, 1),
                (3.0, 4.0, 0.0, 100.0, 0.0, -1),
            ],
            &[(1, 2)],
            vec![VehicleSpec {
                capacity: 5,
                cost_coefficient: 0.0,
                speed: 1.0,
            }],
        );
        assert_eq!(fitness(&sol(&[(0, &[1, 2])]), &inst).unwrap(), 0.0);
    }
}
