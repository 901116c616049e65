use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Instance, ModelError, Route, DEPOT, TIME_TOLERANCE};

/// Timing at one stop of a route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stop {
    pub node: usize,
    pub arrival: f64,
    pub service_start: f64,
    pub departure: f64,
    pub wait: f64,
}

/// Forward timing of one route. The first stop is the depot departure at
/// time 0; for a non-empty route the last stop is the return to the depot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub vehicle: usize,
    pub stops: Vec<Stop>,
}

impl Schedule {
    /// Stops at customer nodes only.
    pub fn visits(&self) -> &[Stop] {
        if self.stops.len() <= 2 {
            &[]
        } else {
            &self.stops[1..self.stops.len() - 1]
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScheduleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("route uses blocked arc {from} -> {to}")]
    Blocked { from: usize, to: usize },
    #[error("time window missed at node {node} (position {position}) by {lateness}")]
    TimeInfeasible {
        node: usize,
        position: usize,
        lateness: f64,
    },
}

/// Load carried after leaving each visited node, in route order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadProfile {
    pub loads: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("load {load} out of [0, {capacity}] after node {node} (position {position})")]
pub struct LoadInfeasible {
    pub node: usize,
    pub position: usize,
    pub load: i64,
    pub capacity: i64,
}

impl LoadInfeasible {
    pub fn magnitude(&self) -> i64 {
        if self.load < 0 {
            -self.load
        } else {
            self.load - self.capacity
        }
    }
}

fn check_route(route: &Route, instance: &Instance) -> Result<(), ModelError> {
    if route.vehicle >= instance.fleet_size() {
        return Err(ModelError::VehicleOutOfRange {
            vehicle: route.vehicle,
            len: instance.fleet_size(),
        });
    }
    for &v in &route.visits {
        if v == DEPOT || v >= instance.len() {
            return Err(ModelError::NodeOutOfRange {
                node: v,
                len: instance.len(),
            });
        }
    }
    Ok(())
}

/// Simulates the route from the depot at time 0, waiting at early arrivals.
///
/// Fails at the first blocked leg or the first node whose service cannot
/// both start and finish inside its window. The return leg is checked only
/// when the depot window is finite.
pub fn propagate_schedule(route: &Route, instance: &Instance) -> Result<Schedule, ScheduleError> {
    check_route(route, instance)?;
    let speed = instance.fleet()[route.vehicle].speed;
    let mut stops = Vec::with_capacity(route.visits.len() + 2);
    stops.push(Stop {
        node: DEPOT,
        arrival: 0.0,
        service_start: 0.0,
        departure: 0.0,
        wait: 0.0,
    });
    if route.visits.is_empty() {
        return Ok(Schedule {
            vehicle: route.vehicle,
            stops,
        });
    }

    let mut prev = DEPOT;
    let mut clock = 0.0;
    for (position, &node) in route.visits.iter().enumerate() {
        let leg = instance
            .distance(prev, node)?
            .ok_or(ScheduleError::Blocked {
                from: prev,
                to: node,
            })?;
        let n = instance.node(node);
        let arrival = clock + leg / speed;
        let service_start = arrival.max(n.window_open);
        let lateness = service_start + n.service_time - n.window_close;
        if lateness > TIME_TOLERANCE {
            return Err(ScheduleError::TimeInfeasible {
                node,
                position,
                lateness,
            });
        }
        let departure = service_start + n.service_time;
        stops.push(Stop {
            node,
            arrival,
            service_start,
            departure,
            wait: service_start - arrival,
        });
        clock = departure;
        prev = node;
    }

    let leg = instance
        .distance(prev, DEPOT)?
        .ok_or(ScheduleError::Blocked {
            from: prev,
            to: DEPOT,
        })?;
    let arrival = clock + leg / speed;
    let depot = instance.node(DEPOT);
    if depot.window_close.is_finite() {
        let lateness = arrival.max(depot.window_open) + depot.service_time - depot.window_close;
        if lateness > TIME_TOLERANCE {
            return Err(ScheduleError::TimeInfeasible {
                node: DEPOT,
                position: route.visits.len(),
                lateness,
            });
        }
    }
    stops.push(Stop {
        node: DEPOT,
        arrival,
        service_start: arrival,
        departure: arrival,
        wait: 0.0,
    });
    Ok(Schedule {
        vehicle: route.vehicle,
        stops,
    })
}

/// Running load starting empty at the depot, adding each node's quantity
/// on departure. Fails at the first point outside `[0, capacity]`.
pub fn load_profile(
    route: &Route,
    instance: &Instance,
) -> Result<Result<LoadProfile, LoadInfeasible>, ModelError> {
    check_route(route, instance)?;
    let capacity = instance.fleet()[route.vehicle].capacity;
    let mut load = 0i64;
    let mut loads = Vec::with_capacity(route.visits.len());
    for (position, &node) in route.visits.iter().enumerate() {
        load += instance.node(node).quantity;
        if load < 0 || load > capacity {
            return Ok(Err(LoadInfeasible {
                node,
                position,
                load,
                capacity,
            }));
        }
        loads.push(load);
    }
    Ok(Ok(LoadProfile { loads }))
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::instance;
    use super::super::VehicleSpec;
    use super::*;

    #[test]
    fn early_arrival_waits_for_window() {
        // depot -> (3,4) is 5 long
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 10.0, 20.0, 2.0, 5),
                (3.0, 4.0, 0.0, 100.0, 0.0, -5),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(10)],
        );
        let s = propagate_schedule(&Route::new(0, vec![1]), &inst).unwrap();
        let v = s.visits()[0];
        assert_eq!(v.arrival, 5.0);
        assert_eq!(v.wait, 5.0);
        assert_eq!(v.service_start, 10.0);
        assert_eq!(v.departure, 12.0);
        assert_eq!(s.stops.last().unwrap().arrival, 17.0);
    }

    #[test]
    fn late_arrival_is_infeasible() {
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 4.0, 0.0, 5),
                (3.0, 4.0, 0.0, 100.0, 0.0, -5),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(10)],
        );
        let err = propagate_schedule(&Route::new(0, vec![1]), &inst).unwrap_err();
        assert!(matches!(
            err,
            ScheduleError::TimeInfeasible {
                node: 1,
                position: 0,
                ..
            }
        ));
    }

    #[test]
    fn service_must_finish_inside_window() {
        // arrival 5 within [0, 6] but service of 2 ends at 7
        let inst = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 6.0, 2.0, 5),
                (3.0, 4.0, 0.0, 100.0, 0.0, -5),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(10)],
        );
        assert!(propagate_schedule(&Route::new(0, vec![1]), &inst).is_err());
    }

    #[test]
    fn empty_route_is_depot_only() {
        let inst = super::super::fixtures::ring_instance();
        let s = propagate_schedule(&Route::new(0, vec![]), &inst).unwrap();
        assert_eq!(s.stops.len(), 1);
        assert_eq!(s.stops[0].departure, 0.0);
        assert!(s.visits().is_empty());
    }

    #[test]
    fn finite_depot_window_bounds_return() {
        let mut nodes = instance(
            (0.0, 0.0),
            &[
                (3.0, 4.0, 0.0, 100.0, 0.0, 5),
                (3.0, 4.0, 0.0, 100.0, 0.0, -5),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(10)],
        )
        .nodes()
        .to_vec();
        nodes[0].window_close = 9.0;
        let inst = Instance::new(
            nodes,
            vec![super::super::Request {
                supplier: 1,
                client: 2,
            }],
            vec![VehicleSpec::with_capacity(10)],
            Default::default(),
        )
        .unwrap();
        let err = propagate_schedule(&Route::new(0, vec![1, 2]), &inst).unwrap_err();
        assert!(matches!(err, ScheduleError::TimeInfeasible { node: 0, .. }));
    }

    #[test]
    fn blocked_leg_fails() {
        let base = super::super::fixtures::ring_instance();
        let inst = Instance::new(
            base.nodes().to_vec(),
            base.requests().to_vec(),
            base.fleet().to_vec(),
            [(5, 1)].into_iter().collect(),
        )
        .unwrap();
        let err = propagate_schedule(&Route::new(0, vec![5, 1]), &inst).unwrap_err();
        assert_eq!(err, ScheduleError::Blocked { from: 5, to: 1 });
    }

    fn load_instance(qs: &[i64], cap: i64) -> Instance {
        let rows: Vec<_> = qs.iter().map(|&q| (1.0, 1.0, 0.0, 100.0, 0.0, q)).collect();
        let pairs: Vec<_> = (0..qs.len() / 2).map(|r| (2 * r + 1, 2 * r + 2)).collect();
        instance(
            (0.0, 0.0),
            &rows,
            &pairs,
            vec![VehicleSpec::with_capacity(cap)],
        )
    }

    #[test]
    fn paired_pickup_delivery_loads() {
        let inst = load_instance(&[30, -30], 60);
        let p = load_profile(&Route::new(0, vec![1, 2]), &inst)
            .unwrap()
            .unwrap();
        assert_eq!(p.loads, vec![30, 0]);
    }

    #[test]
    fn delivery_first_goes_negative() {
        let inst = load_instance(&[30, -30], 60);
        let e = load_profile(&Route::new(0, vec![2]), &inst)
            .unwrap()
            .unwrap_err();
        assert_eq!(e.load, -30);
        assert_eq!(e.magnitude(), 30);
    }

    #[test]
    fn two_pickups_overflow() {
        let inst = load_instance(&[40, -40, 30, -30], 60);
        let e = load_profile(&Route::new(0, vec![1, 3]), &inst)
            .unwrap()
            .unwrap_err();
        assert_eq!((e.position, e.load, e.magnitude()), (1, 70, 10));
    }
}
