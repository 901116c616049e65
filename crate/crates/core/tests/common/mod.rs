#![allow(dead_code)]

use std::collections::BTreeSet;

use pdptw_core::model::{Instance, Node, Request, Route, RoutedSolution, VehicleSpec};
use rand::seq::SliceRandom;
use rand::Rng;

/// Small random instance with integer coordinates. Windows, capacities and
/// blocked arcs are loose enough that some random solutions are feasible and
/// tight enough that most are not.
pub fn small_instance<R: Rng>(rng: &mut R, n_prime: usize, k: usize) -> Instance {
    let mut depot = Node::depot(rng.gen_range(0..=40) as f64, rng.gen_range(0..=40) as f64);
    if rng.gen_bool(0.3) {
        depot.window_close = rng.gen_range(150..=600) as f64;
    }
    let mut nodes = vec![depot];
    let mut requests = Vec::new();
    for r in 0..n_prime / 2 {
        let q = rng.gen_range(1..=30);
        for quantity in [q, -q] {
            let open = rng.gen_range(0..=150) as f64;
            nodes.push(Node {
                id: nodes.len(),
                x: rng.gen_range(0..=40) as f64,
                y: rng.gen_range(0..=40) as f64,
                window_open: open,
                window_close: open + rng.gen_range(20..=400) as f64,
                service_time: rng.gen_range(0..=8) as f64,
                quantity,
            });
        }
        requests.push(Request {
            supplier: 2 * r + 1,
            client: 2 * r + 2,
        });
    }
    let fleet = (0..k)
        .map(|_| VehicleSpec {
            capacity: rng.gen_range(20..=70),
            cost_coefficient: rng.gen_range(1..=3) as f64,
            speed: [1.0, 1.0, 2.0][rng.gen_range(0..3)],
        })
        .collect();
    let mut blocked = BTreeSet::new();
    if rng.gen_bool(0.3) {
        let a = rng.gen_range(0..=n_prime);
        let b = rng.gen_range(0..=n_prime);
        if a != b {
            blocked.insert((a, b));
        }
    }
    Instance::new(nodes, requests, fleet, blocked).unwrap()
}

/// Random routing of all customers, sometimes deliberately broken.
pub fn random_solution<R: Rng>(rng: &mut R, inst: &Instance) -> RoutedSolution {
    let n = inst.n_prime();
    let k = inst.fleet_size();
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let routes_wanted = rng.gen_range(1..=k);
    let mut cuts: Vec<usize> = (0..routes_wanted - 1)
        .map(|_| rng.gen_range(0..=n))
        .collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut vehicles: Vec<usize> = (0..k).collect();
    vehicles.shuffle(rng);
    let mut routes = Vec::new();
    let mut at = 0;
    for (i, &c) in cuts.iter().enumerate() {
        routes.push(Route::new(vehicles[i], order[at..c].to_vec()));
        at = c;
    }

    match rng.gen_range(0..12) {
        0 => {
            let r = rng.gen_range(0..routes.len());
            let dup = rng.gen_range(1..=n);
            let pos = rng.gen_range(0..=routes[r].visits.len());
            routes[r].visits.insert(pos, dup);
        }
        1 => {
            let r = rng.gen_range(0..routes.len());
            if !routes[r].visits.is_empty() {
                let pos = rng.gen_range(0..routes[r].visits.len());
                routes[r].visits.remove(pos);
            }
        }
        2 => {
            let r = rng.gen_range(0..routes.len());
            let pos = rng.gen_range(0..=routes[r].visits.len());
            routes[r].visits.insert(pos, 0);
        }
        3 => routes[0].visits.push(n + 1 + rng.gen_range(0..3)),
        4 => {
            let v = routes[0].vehicle;
            routes.push(Route::new(v, Vec::new()));
        }
        5 => routes[0].vehicle = k + rng.gen_range(0..2),
        _ => {}
    }
    RoutedSolution::new(routes)
}

/// Brute-force minimum over every assignment of customers to vehicles
/// and every visiting order within each route, built independently of the
/// oracle's enumeration. `check` returns the cost of a feasible solution.
/// Returns (feasible count, best cost).
pub fn brute_force<F>(inst: &Instance, vehicles: usize, check: F) -> (u64, Option<f64>)
where
    F: Fn(&RoutedSolution) -> Option<f64>,
{
    fn orders(items: &[usize]) -> Vec<Vec<usize>> {
        if items.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let head = rest.remove(i);
            for mut tail in orders(&rest) {
                tail.insert(0, head);
                out.push(tail);
            }
        }
        out
    }

    let n = inst.n_prime();
    let mut count = 0;
    let mut best: Option<f64> = None;
    let total = (vehicles as u64).pow(n as u32);
    for code in 0..total {
        let mut groups = vec![Vec::new(); vehicles];
        let mut c = code;
        for node in 1..=n {
            groups[(c % vehicles as u64) as usize].push(node);
            c /= vehicles as u64;
        }
        let per_route: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| orders(g)).collect();
        let mut idx = vec![0usize; vehicles];
        loop {
            let sol = RoutedSolution::new(
                (0..vehicles)
                    .filter(|&v| !groups[v].is_empty())
                    .map(|v| Route::new(v, per_route[v][idx[v]].clone()))
                    .collect(),
            );
            if let Some(cost) = check(&sol) {
                count += 1;
                if best.is_none_or(|b| cost < b) {
                    best = Some(cost);
                }
            }
            let mut v = 0;
            while v < vehicles {
                idx[v] += 1;
                if idx[v] < per_route[v].len() {
                    break;
                }
                idx[v] = 0;
                v += 1;
            }
            if v == vehicles {
                break;
            }
        }
    }
    (count, best)
}
