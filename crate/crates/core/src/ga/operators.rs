use rand::Rng;

use super::chromosome::{NodeChromosome, VehicleChromosome};
use super::repair::{repair_capacity, repair_precedence};
use crate::model::Instance;

fn repair(chrom: &NodeChromosome, instance: &Instance) -> NodeChromosome {
    repair_capacity(&repair_precedence(chrom, instance), instance)
}

/// One-point crossover with order-preserving completion: each child keeps
/// its own parent's prefix up to `point` and takes the remaining ids in the
/// other parent's order. No repair.
pub fn order_crossover(
    p1: &NodeChromosome,
    p2: &NodeChromosome,
    point: usize,
) -> (NodeChromosome, NodeChromosome) {
    (complete(p1, p2, point), complete(p2, p1, point))
}

fn complete(head: &NodeChromosome, tail: &NodeChromosome, point: usize) -> NodeChromosome {
    let prefix = &head.0[..point.min(head.len())];
    let mut genes = prefix.to_vec();
    genes.extend(tail.0.iter().filter(|g| !prefix.contains(g)));
    NodeChromosome(genes)
}

/// [`order_crossover`] followed by precedence and capacity repair.
pub fn crossover_nodes(
    p1: &NodeChromosome,
    p2: &NodeChromosome,
    point: usize,
    instance: &Instance,
) -> (NodeChromosome, NodeChromosome) {
    let (a, b) = order_crossover(p1, p2, point);
    (repair(&a, instance), repair(&b, instance))
}

/// Exchanges tails at `point`, then restores the total and the bound on
/// non-empty slots.
pub fn crossover_vehicles(
    p1: &VehicleChromosome,
    p2: &VehicleChromosome,
    point: usize,
    n_prime: usize,
    max_routes: usize,
) -> (VehicleChromosome, VehicleChromosome) {
    let cut = |a: &VehicleChromosome, b: &VehicleChromosome| {
        let mut counts = a.0[..point].to_vec();
        counts.extend_from_slice(&b.0[point..]);
        normalize_counts(counts, n_prime, max_routes)
    };
    (cut(p1, p2), cut(p2, p1))
}

/// Brings `counts` back to a valid composition of `n_prime` with at most
/// `max_routes` non-empty slots.
///
/// A shortfall goes to the last non-empty slot. An excess is taken from the
/// last non-empty slot, spilling into earlier slots once it reaches zero.
/// Surplus non-empty slots beyond `max_routes` are folded into the last
/// retained one.
pub fn normalize_counts(
    mut counts: Vec<usize>,
    n_prime: usize,
    max_routes: usize,
) -> VehicleChromosome {
    if counts.is_empty() {
        return VehicleChromosome(counts);
    }
    let sum: usize = counts.iter().sum();
    if sum < n_prime {
        let slot = counts.iter().rposition(|&c| c > 0).unwrap_or(0);
        counts[slot] += n_prime - sum;
    } else if sum > n_prime {
        let mut excess = sum - n_prime;
        for c in counts.iter_mut().rev() {
            let take = excess.min(*c);
            *c -= take;
            excess -= take;
            if excess == 0 {
                break;
            }
        }
    }
    let used: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 0).collect();
    if max_routes > 0 && used.len() > max_routes {
        let keep = used[max_routes - 1];
        for &i in &used[max_routes..] {
            counts[keep] += counts[i];
            counts[i] = 0;
        }
    }
    VehicleChromosome(counts)
}

/// Exchanges the genes at positions `i` and `j`. No repair.
pub fn swap_mutation(chrom: &NodeChromosome, i: usize, j: usize) -> NodeChromosome {
    let mut genes = chrom.0.clone();
    genes.swap(i, j);
    NodeChromosome(genes)
}

/// Swaps two distinct random positions, then repairs.
pub fn mutate_nodes<R: Rng + ?Sized>(
    chrom: &NodeChromosome,
    instance: &Instance,
    rng: &mut R,
) -> NodeChromosome {
    let len = chrom.len();
    if len < 2 {
        return repair(chrom, instance);
    }
    let i = rng.gen_range(0..len);
    let mut j = rng.gen_range(0..len - 1);
    if j >= i {
        j += 1;
    }
    repair(&swap_mutation(chrom, i, j), instance)
}

/// Moves one unit from a random non-empty slot to another slot, never
/// exceeding `max_routes` non-empty slots. Returns the input unchanged when
/// no legal move exists.
pub fn mutate_vehicles<R: Rng + ?Sized>(
    chrom: &VehicleChromosome,
    max_routes: usize,
    rng: &mut R,
) -> VehicleChromosome {
    let counts = &chrom.0;
    let sources: Vec<usize> = (0..counts.len()).filter(|&i| counts[i] > 0).collect();
    if sources.is_empty() {
        return chrom.clone();
    }
    let src = sources[rng.gen_range(0..sources.len())];
    let used = sources.len();
    let targets: Vec<usize> = (0..counts.len())
        .filter(|&j| j != src && (counts[j] > 0 || used < max_routes || counts[src] == 1))
        .collect();
    if targets.is_empty() {
        return chrom.clone();
    }
    let dst = targets[rng.gen_range(0..targets.len())];
    let mut out = counts.clone();
    out[src] -= 1;
    out[dst] += 1;
    VehicleChromosome(out)
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::ga::chromosome::{random_node_chromosome, random_vehicle_chromosome};
    use crate::model::fixtures::{instance, ring_instance};
    use crate::model::VehicleSpec;

    fn nc(v: &[usize]) -> NodeChromosome {
        NodeChromosome(v.to_vec())
    }

    #[test]
    fn order_crossover_hand_trace() {
        let (a, b) = order_crossover(&nc(&[1, 2, 3, 4]), &nc(&[4, 3, 2, 1]), 2);
        assert_eq!(a.0, vec![1, 2, 4, 3]);
        assert_eq!(b.0, vec![4, 3, 1, 2]);
    }

    #[test]
    fn identical_parents_reproduce() {
        let inst = ring_instance();
        let p = nc(&[5, 1, 8, 2, 7, 9, 3, 10, 6, 4]);
        for point in 1..10 {
            let (a, b) = crossover_nodes(&p, &p, point, &inst);
            assert_eq!(a, p);
            assert_eq!(b, p);
        }
        let v = VehicleChromosome(vec![6, 4, 0, 0, 0]);
        for point in 1..5 {
            let (a, b) = crossover_vehicles(&v, &v, point, 10, 5);
            assert_eq!(a, v);
            assert_eq!(b, v);
        }
    }

    #[test]
    fn crossover_children_are_repaired_permutations() {
        let inst = ring_instance();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let p1 = random_node_chromosome(&inst, &mut rng);
            let p2 = random_node_chromosome(&inst, &mut rng);
            let point = rng.gen_range(1..10);
            let (a, b) = crossover_nodes(&p1, &p2, point, &inst);
            for c in [a, b] {
                assert!(c.is_permutation_of(&inst));
                assert!(c.respects_precedence(&inst));
            }
        }
    }

    #[test]
    fn vehicle_crossover_renormalizes() {
        let (a, b) = crossover_vehicles(
            &VehicleChromosome(vec![6, 4, 0, 0, 0]),
            &VehicleChromosome(vec![2, 8, 0, 0, 0]),
            1,
            10,
            5,
        );
        assert_eq!(a.0, vec![6, 4, 0, 0, 0]);
        assert_eq!(b.0, vec![2, 8, 0, 0, 0]);
        assert_eq!(a.total(), 10);
    }

    #[test]
    fn vehicle_crossover_respects_fleet_bound() {
        let inst = ring_instance();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for max_routes in 1..=5 {
            for _ in 0..300 {
                let mut counts = vec![0; 5];
                for _ in 0..rng.gen_range(0..15) {
                    counts[rng.gen_range(0..5)] += 1;
                }
                let v = normalize_counts(counts, 10, max_routes);
                assert_eq!(v.total(), 10);
                assert!(v.used_slots() <= max_routes);
            }
            let p1 = random_vehicle_chromosome(&inst, &mut rng);
            let p2 = random_vehicle_chromosome(&inst, &mut rng);
            let (a, b) = crossover_vehicles(&p1, &p2, rng.gen_range(1..5), 10, max_routes);
            assert!(a.used_slots() <= max_routes && b.used_slots() <= max_routes);
        }
    }

    #[test]
    fn independent_supplier_swap_changes_two_genes() {
        let inst = ring_instance();
        // suppliers 5 and 8 both lead their clients after the swap
        let c = nc(&[5, 8, 1, 2, 7, 9, 3, 10, 6, 4]);
        let m = repair(&swap_mutation(&c, 0, 1), &inst);
        let diff: Vec<_> = (0..10).filter(|&i| m.0[i] != c.0[i]).collect();
        assert_eq!(diff, vec![0, 1]);
    }

    #[test]
    fn forced_bad_swap_is_repaired() {
        let inst = ring_instance();
        let c = nc(&[5, 1, 8, 2, 7, 9, 3, 10, 6, 4]);
        let raw = swap_mutation(&c, 0, 1);
        assert!(!raw.respects_precedence(&inst));
        assert!(repair(&raw, &inst).respects_precedence(&inst));
    }

    #[test]
    fn length_two_mutation() {
        let inst = instance(
            (0.0, 0.0),
            &[
                (1.0, 0.0, 0.0, 10.0, 0.0, 3),
                (2.0, 0.0, 0.0, 10.0, 0.0, -3),
            ],
            &[(1, 2)],
            vec![VehicleSpec::with_capacity(5)],
        );
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(mutate_nodes(&nc(&[1, 2]), &inst, &mut rng).0, vec![1, 2]);
    }

    #[test]
    fn vehicle_mutation_moves_one_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = VehicleChromosome(vec![6, 4, 0, 0, 0]);
        for _ in 0..200 {
            let m = mutate_vehicles(&v, 5, &mut rng);
            assert_eq!(m.total(), 10);
            let moved: usize = v.0.iter().zip(&m.0).map(|(a, b)| a.abs_diff(*b)).sum();
            assert_eq!(moved, 2);
        }
        let mut seen_even = false;
        for _ in 0..200 {
            seen_even |= mutate_vehicles(&v, 2, &mut rng).0 == vec![5, 5, 0, 0, 0];
        }
        assert!(seen_even);
    }

    #[test]
    fn vehicle_mutation_without_legal_move() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = VehicleChromosome(vec![10, 0, 0, 0, 0]);
        for _ in 0..50 {
            assert_eq!(mutate_vehicles(&v, 1, &mut rng), v);
        }
        for _ in 0..50 {
            assert!(
                mutate_vehicles(&VehicleChromosome(vec![3, 0, 7]), 2, &mut rng).used_slots() <= 2
            );
        }
    }
}
