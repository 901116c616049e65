//! Chromosome corrections applied after every initialization and variation
//! step.

use super::chromosome::NodeChromosome;
use crate::model::Instance;

/// Moves each supplier found after its client to the slot immediately
/// before that client.
///
/// A single left-to-right pass suffices: relocations only move suppliers
/// earlier, so no already-checked pair is disturbed.
pub fn repair_precedence(chrom: &NodeChromosome, instance: &Instance) -> NodeChromosome {
    let mut genes = chrom.0.clone();
    let mut i = 0;
    while i < genes.len() {
        let node = genes[i];
        if instance.node(node).is_client() {
            let supplier = instance.partner(node);
            if let Some(at) = genes[i + 1..].iter().position(|&g| g == supplier) {
                genes[i..=i + 1 + at].rotate_right(1);
                // supplier now at i, client at i + 1
                i += 2;
                continue;
            }
        }
        i += 1;
    }
    NodeChromosome(genes)
}

/// Sheds load on the flattened chromosome against the largest fleet
/// capacity.
///
/// When adding the node at position `p` would push the running load above
/// capacity, the client of the most recently loaded supplier still on board
/// (supplier before `p`, client after `p`) is pulled forward to `p`. If no
/// such client exists the overload is left for the fitness penalty.
pub fn repair_capacity(chrom: &NodeChromosome, instance: &Instance) -> NodeChromosome {
    let capacity = instance.max_capacity();
    let mut genes = chrom.0.clone();
    let mut pos = vec![usize::MAX; instance.len()];
    for (i, &g) in genes.iter().enumerate() {
        pos[g] = i;
    }

    let mut load = 0i64;
    let mut p = 0;
    while p < genes.len() {
        let q = instance.node(genes[p]).quantity;
        if load + q > capacity {
            let mut pick: Option<(usize, usize)> = None; // (supplier pos, client pos)
            for (j, &g) in genes.iter().enumerate().skip(p + 1) {
                if !instance.node(g).is_client() {
                    continue;
                }
                let sp = pos[instance.partner(g)];
                if sp < p && pick.is_none_or(|(best, _)| sp > best) {
                    pick = Some((sp, j));
                }
            }
            if let Some((_, j)) = pick {
                genes[p..=j].rotate_right(1);
                for (k, &g) in genes.iter().enumerate().take(j + 1).skip(p) {
                    pos[g] = k;
                }
                load += instance.node(genes[p]).quantity;
                p += 1;
                continue;
            }
        }
        load += q;
        p += 1;
    }
    NodeChromosome(genes)
}
