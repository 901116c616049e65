use rand::seq::index;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::repair::{repair_capacity, repair_precedence};
use crate::model::{Instance, Route, RoutedSolution};

/// Visit order over all customer nodes. The depot is not part of the
/// genotype.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeChromosome(pub Vec<usize>);

impl NodeChromosome {
    pub fn genes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the genes are exactly the customer ids `1..=N'`, each once.
    pub fn is_permutation_of(&self, instance: &Instance) -> bool {
        let n = instance.n_prime();
        if self.0.len() != n {
            return false;
        }
        let mut seen = vec![false; n + 1];
        for &g in &self.0 {
            if g == 0 || g > n || seen[g] {
                return false;
            }
            seen[g] = true;
        }
        true
    }

    /// Every supplier sits before its client.
    pub fn respects_precedence(&self, instance: &Instance) -> bool {
        let mut pos = vec![usize::MAX; instance.len()];
        for (i, &g) in self.0.iter().enumerate() {
            pos[g] = i;
        }
        instance
            .requests()
            .iter()
            .all(|r| pos[r.supplier] < pos[r.client])
    }
}

/// Number of consecutive permutation entries served by each vehicle slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VehicleChromosome(pub Vec<usize>);

impl VehicleChromosome {
    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn used_slots(&self) -> usize {
        self.0.iter().filter(|&&c| c > 0).count()
    }

    pub fn is_valid_for(&self, instance: &Instance) -> bool {
        self.0.len() == vehicle_slots(instance)
            && self.total() == instance.n_prime()
            && self.used_slots() <= instance.fleet_size()
    }
}

/// Length of a vehicle chromosome: one slot per possible route, at most
/// half the customer count (every route serves at least one request).
pub fn vehicle_slots(instance: &Instance) -> usize {
    (instance.n_prime() / 2).max(1)
}

/// Routes a chromosome may use at once.
pub fn max_routes(instance: &Instance) -> usize {
    instance.fleet_size().min(vehicle_slots(instance))
}

/// Uniform shuffle of the customer ids, then precedence and capacity repair.
pub fn random_node_chromosome<R: Rng + ?Sized>(instance: &Instance, rng: &mut R) -> NodeChromosome {
    let mut genes: Vec<usize> = (1..=instance.n_prime()).collect();
    genes.shuffle(rng);
    let repaired = repair_precedence(&NodeChromosome(genes), instance);
    repair_capacity(&repaired, instance)
}

/// Random composition of N' over the vehicle slots with between one and
/// `max_routes` non-empty slots.
pub fn random_vehicle_chromosome<R: Rng + ?Sized>(
    instance: &Instance,
    rng: &mut R,
) -> VehicleChromosome {
    let n = instance.n_prime();
    let slots = vehicle_slots(instance);
    let mut counts = vec![0; slots];
    if n == 0 {
        return VehicleChromosome(counts);
    }
    let used = rng.gen_range(1..=max_routes(instance).min(n));
    let mut chosen = index::sample(rng, slots, used).into_vec();
    chosen.sort_unstable();
    let mut cuts: Vec<usize> = index::sample(rng, n - 1, used - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut prev = 0;
    for (slot, cut) in chosen.into_iter().zip(cuts) {
        counts[slot] = cut - prev;
        prev = cut;
    }
    VehicleChromosome(counts)
}

/// Splits the permutation in order: each non-empty slot takes the next
/// `count` nodes. The r-th non-empty slot is driven by fleet vehicle r.
pub fn decode(nodes: &NodeChromosome, vehicles: &VehicleChromosome) -> RoutedSolution {
    let mut routes = Vec::new();
    let mut offset = 0;
    for &count in vehicles.counts() {
        if count == 0 {
            continue;
        }
        let end = (offset + count).min(nodes.len());
        routes.push(Route::new(routes.len(), nodes.0[offset..end].to_vec()));
        offset = end;
    }
    RoutedSolution::new(routes)
}
