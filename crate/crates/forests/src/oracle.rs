//! Reference implementations used to validate the real algorithms.
//!
//! Everything here is deliberately naive: full subset enumeration over u64
//! masks and a from-scratch DFS cycle check. Nothing in the production path
//! may call into this module; tests compare against it. Keep it dumb.

use crate::bitset::VertexSet;
use crate::graph::Graph;

const MAX_N: usize = 20;

fn adjacency_masks(g: &Graph) -> Vec<u64> {
    assert!(g.n() <= MAX_N, "oracle is for tiny graphs only");
    let mut adj = vec![0u64; g.n()];
    for (u, v) in g.edges() {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

/// Independent forest check: recursive DFS looking for a back edge within
/// the induced subgraph.
pub fn is_forest_dfs(g: &Graph, s: &VertexSet) -> bool {
    let n = g.n();
    let mut visited = vec![false; n];
    for root in s.iter() {
        if visited[root] {
            continue;
        }
        // (vertex, parent) stack; a visited non-parent neighbor is a cycle.
        let mut stack = vec![(root, usize::MAX)];
        visited[root] = true;
        while let Some((v, parent)) = stack.pop() {
            let mut skipped_parent = false;
            for u in g.neighbors(v).iter() {
                if !s.contains(u) {
                    continue;
                }
                if u == parent && !skipped_parent {
                    // A simple graph has one edge to the parent; the first
                    // sighting is the tree edge, any further one a cycle.
                    skipped_parent = true;
                    continue;
                }
                if visited[u] {
                    return false;
                }
                visited[u] = true;
                stack.push((u, v));
            }
        }
    }
    true
}

fn mask_is_forest(adj: &[u64], mask: u64) -> bool {
    // edges == vertices - components, checked by DFS over the mask.
    let mut edges = 0;
    let mut v_iter = mask;
    while v_iter != 0 {
        let v = v_iter.trailing_zeros() as usize;
        v_iter &= v_iter - 1;
        edges += (adj[v] & mask).count_ones() as usize;
    }
    edges /= 2;
    mask.count_ones() as usize == edges + mask_component_count(adj, mask)
}

fn mask_component_count(adj: &[u64], mask: u64) -> usize {
    let mut remaining = mask;
    let mut count = 0;
    while remaining != 0 {
        count += 1;
        let start = remaining.trailing_zeros() as usize;
        let mut comp = 1u64 << start;
        loop {
            let mut grown = comp;
            let mut it = comp;
            while it != 0 {
                let v = it.trailing_zeros() as usize;
                it &= it - 1;
                grown |= adj[v] & mask;
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        remaining &= !comp;
    }
    count
}

fn mask_is_linear_k(adj: &[u64], mask: u64, k: usize) -> bool {
    let mut it = mask;
    while it != 0 {
        let v = it.trailing_zeros() as usize;
        it &= it - 1;
        if (adj[v] & mask).count_ones() > 2 {
            return false;
        }
    }
    if !mask_is_forest(adj, mask) {
        return false;
    }
    // Each component is now a path; its edge count is size - 1.
    let mut remaining = mask;
    while remaining != 0 {
        let start = remaining.trailing_zeros() as usize;
        let mut comp = 1u64 << start;
        loop {
            let mut grown = comp;
            let mut ci = comp;
            while ci != 0 {
                let v = ci.trailing_zeros() as usize;
                ci &= ci - 1;
                grown |= adj[v] & mask;
            }
            if grown == comp {
                break;
            }
            comp = grown;
        }
        if comp.count_ones() as usize - 1 > k {
            return false;
        }
        remaining &= !comp;
    }
    true
}

fn best_subset<F: Fn(u64) -> bool>(n: usize, feasible: F) -> u64 {
    let mut best = 0u64;
    let mut best_size = 0;
    for mask in 0..(1u64 << n) {
        let size = mask.count_ones() as usize;
        if size > best_size && feasible(mask) {
            best = mask;
            best_size = size;
        }
    }
    best
}

fn mask_to_set(n: usize, mask: u64) -> VertexSet {
    VertexSet::from_members(n, (0..n).filter(|&v| mask >> v & 1 == 1))
}

/// Maximum induced forest by full enumeration.
pub fn max_forest(g: &Graph) -> (usize, VertexSet) {
    let adj = adjacency_masks(g);
    let best = best_subset(g.n(), |mask| mask_is_forest(&adj, mask));
    (best.count_ones() as usize, mask_to_set(g.n(), best))
}

/// Maximum induced linear k-forest by full enumeration.
pub fn max_linear_k(g: &Graph, k: usize) -> (usize, VertexSet) {
    let adj = adjacency_masks(g);
    let best = best_subset(g.n(), |mask| mask_is_linear_k(&adj, mask, k));
    (best.count_ones() as usize, mask_to_set(g.n(), best))
}

/// Clique number by full enumeration.
pub fn clique_number(g: &Graph) -> usize {
    if g.n() == 0 {
        return 0;
    }
    let adj = adjacency_masks(g);
    let best = best_subset(g.n(), |mask| {
        let mut it = mask;
        while it != 0 {
            let v = it.trailing_zeros() as usize;
            it &= it - 1;
            if adj[v] & mask != mask & !(1 << v) {
                return false;
            }
        }
        true
    });
    best.count_ones() as usize
}
