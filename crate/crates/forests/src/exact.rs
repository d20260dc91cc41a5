//! Exact maximum induced forest / linear forest solver for small graphs.
//!
//! Works on bitmask adjacency (hence the hard 64-vertex ceiling; in
//! practice expect reasonable times up to roughly 40 vertices, less for
//! dense inputs). The search branches on obstructions: a witness that the
//! current vertex set cannot stay as-is. For forests the only obstruction
//! is a cycle; for linear forests with component paths of at most k edges
//! there are two more, a vertex of degree three and a path on k+2
//! vertices. Every branch removes one obstruction vertex and forces the
//! earlier branch choices to stay, so no subset is explored twice.
//!
//! Pruning is a greedy packing of vertex-disjoint obstructions: each one
//! still costs at least one deletion, which caps how large the final set
//! can get. A greedy feasible set seeds the incumbent before the search
//! starts, and an optional node budget turns long runs into an
//! `Incomplete` error that still carries the best set found.

use crate::bitset::VertexSet;
use crate::bounds::{BoundReport, Target};
use crate::graph::Graph;
use crate::ratio::ceil_i64;
use serde::Serialize;
use thiserror::Error;

pub const MAX_N: usize = 64;

#[derive(Debug, Clone, Serialize)]
pub struct ExactResult {
    pub target: Target,
    pub optimum: usize,
    pub witness: VertexSet,
    pub nodes: u64,
    pub elapsed_ms: u64,
    pub complete: bool,
}

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("graph has {n} vertices, the exact solver handles at most {max}")]
    TooLarge { n: usize, max: usize },
    #[error("node budget exhausted after {} nodes (best so far: {})", .0.nodes, .0.optimum)]
    Incomplete(Box<ExactResult>),
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(v)
        }
    })
}

struct Solver {
    adj: Vec<u64>,
    target: Target,
    best_mask: u64,
    best_size: u32,
    nodes: u64,
    budget: u64,
    interrupted: bool,
}

impl Solver {
    fn new(g: &Graph, target: Target, budget: u64) -> Self {
        let adj = (0..g.n())
            .map(|v| {
                g.neighbors(v)
                    .iter()
                    .fold(0u64, |acc, w| acc | (1u64 << w))
            })
            .collect();
        Solver {
            adj,
            target,
            best_mask: 0,
            best_size: 0,
            nodes: 0,
            budget,
            interrupted: false,
        }
    }

    /// Some obstruction inside `mask`, or None when `mask` already induces
    /// the target structure.
    fn find_obstruction(&self, mask: u64) -> Option<u64> {
        if let Target::LinearK(k) = self.target {
            if let Some(star) = self.find_deg3(mask) {
                return Some(star);
            }
            if let Some(cycle) = self.find_cycle(mask) {
                return Some(cycle);
            }
            return self.find_long_path(mask, k);
        }
        self.find_cycle(mask)
    }

    fn find_deg3(&self, mask: u64) -> Option<u64> {
        for v in bits(mask) {
            let nb = self.adj[v] & mask;
            if nb.count_ones() >= 3 {
                let mut star = 1u64 << v;
                for w in bits(nb).take(3) {
                    star |= 1u64 << w;
                }
                return Some(star);
            }
        }
        None
    }

    fn find_cycle(&self, mask: u64) -> Option<u64> {
        let mut color = [0u8; MAX_N];
        let mut path = Vec::new();
        for root in bits(mask) {
            if color[root] == 0 {
                if let Some(c) = self.cycle_dfs(root, usize::MAX, mask, &mut color, &mut path) {
                    return Some(c);
                }
            }
        }
        None
    }

    fn cycle_dfs(
        &self,
        v: usize,
        parent: usize,
        mask: u64,
        color: &mut [u8; MAX_N],
        path: &mut Vec<usize>,
    ) -> Option<u64> {
        color[v] = 1;
        path.push(v);
        for w in bits(self.adj[v] & mask) {
            if w == parent {
                continue;
            }
            if color[w] == 1 {
                let pos = path.iter().position(|&x| x == w).unwrap();
                return Some(path[pos..].iter().fold(0u64, |m, &x| m | (1u64 << x)));
            }
            if color[w] == 0 {
                if let Some(c) = self.cycle_dfs(w, v, mask, color, path) {
                    return Some(c);
                }
            }
        }
        color[v] = 2;
        path.pop();
        None
    }

    /// Only called once degrees are <= 2 and no cycle exists, so every
    /// component is a path reachable from an endpoint.
    fn find_long_path(&self, mask: u64, k: usize) -> Option<u64> {
        let mut seen = 0u64;
        for v in bits(mask) {
            if seen & (1u64 << v) != 0 || (self.adj[v] & mask).count_ones() >= 2 {
                continue;
            }
            let mut walked = 0u64;
            let mut cur = v;
            loop {
                walked |= 1u64 << cur;
                if walked.count_ones() as usize == k + 2 {
                    return Some(walked);
                }
                let next = self.adj[cur] & mask & !walked;
                if next == 0 {
                    break;
                }
                cur = next.trailing_zeros() as usize;
            }
            seen |= walked;
        }
        None
    }

    fn feasible(&self, mask: u64) -> bool {
        self.find_obstruction(mask).is_none()
    }

    fn greedy_seed(&self, full: u64) -> u64 {
        let mut s = 0u64;
        for v in bits(full) {
            if self.feasible(s | (1u64 << v)) {
                s |= 1u64 << v;
            }
        }
        s
    }

    /// Greedy count of vertex-disjoint obstructions; None means one of them
    /// sits entirely inside `chosen`, which no deletion can fix.
    fn disjoint_obstructions(&self, union: u64, chosen: u64) -> Option<u32> {
        let mut scratch = union;
        let mut count = 0;
        while let Some(o) = self.find_obstruction(scratch) {
            if o & !chosen == 0 {
                return None;
            }
            count += 1;
            scratch &= !o;
        }
        Some(count)
    }

    fn expand(&mut self, chosen: u64, cand: u64) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.interrupted = true;
            return;
        }
        let union = chosen | cand;
        let size = union.count_ones();
        if size <= self.best_size {
            return;
        }
        let obs = match self.find_obstruction(union) {
            None => {
                self.best_size = size;
                self.best_mask = union;
                return;
            }
            Some(o) => o,
        };
        match self.disjoint_obstructions(union & !obs, chosen) {
            None => return,
            // The packing below `obs` plus `obs` itself each cost a vertex.
            Some(extra) => {
                if size - extra - 1 <= self.best_size {
                    return;
                }
            }
        }
        let mut forced = chosen;
        let mut cand = cand;
        for v in bits(obs & cand) {
            self.expand(forced, cand & !(1u64 << v));
            if self.interrupted {
                return;
            }
            forced |= 1u64 << v;
            cand &= !(1u64 << v);
        }
    }
}

/// Finds a maximum set inducing the target structure. `budget` caps the
/// number of search nodes; None means unbounded.
pub fn solve(g: &Graph, target: Target, budget: Option<u64>) -> Result<ExactResult, ExactError> {
    let n = g.n();
    if n > MAX_N {
        return Err(ExactError::TooLarge { n, max: MAX_N });
    }
    let start = std::time::Instant::now();
    let mut solver = Solver::new(g, target, budget.unwrap_or(u64::MAX));
    let full = if n == 64 { !0u64 } else { (1u64 << n) - 1 };
    let seed = solver.greedy_seed(full);
    solver.best_mask = seed;
    solver.best_size = seed.count_ones();
    solver.expand(0, full);
    let result = ExactResult {
        target,
        optimum: solver.best_size as usize,
        witness: VertexSet::from_members(n, bits(solver.best_mask)),
        nodes: solver.nodes,
        elapsed_ms: start.elapsed().as_millis() as u64,
        complete: !solver.interrupted,
    };
    if solver.interrupted {
        Err(ExactError::Incomplete(Box::new(result)))
    } else {
        Ok(result)
    }
}

pub fn max_induced_forest(g: &Graph) -> Result<ExactResult, ExactError> {
    solve(g, Target::Forest, None)
}

pub fn max_linear_k(g: &Graph, k: usize) -> Result<ExactResult, ExactError> {
    solve(g, Target::LinearK(k), None)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub id: String,
    pub target: Target,
    pub bound_ceil: i64,
    pub optimum: usize,
    /// Bound at most the optimum, as it must be.
    pub ok: bool,
    /// optimum - ceil(bound); zero means the bound is sharp here.
    pub slack: i64,
}

/// Solves each target mentioned by an applicable report entry and checks
/// the entry's ceiling against the true optimum.
pub fn verify_bound_against_exact(
    g: &Graph,
    report: &BoundReport,
    budget: Option<u64>,
) -> Result<Vec<BoundCheck>, ExactError> {
    let mut cache: Vec<(Target, usize)> = Vec::new();
    let mut out = Vec::new();
    for e in report.entries.iter().filter(|e| e.applicable) {
        let optimum = match cache.iter().find(|(t, _)| *t == e.target) {
            Some(&(_, v)) => v,
            None => {
                let v = solve(g, e.target, budget)?.optimum;
                cache.push((e.target, v));
                v
            }
        };
        let bound_ceil = ceil_i64(&e.value);
        out.push(BoundCheck {
            id: e.id.clone(),
            target: e.target,
            bound_ceil,
            optimum,
            ok: bound_ceil <= optimum as i64,
            slack: optimum as i64 - bound_ceil,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::catalog;
    use crate::oracle;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn assert_witness_ok(g: &Graph, r: &ExactResult) {
        assert_eq!(r.witness.len(), r.optimum);
        match r.target {
            Target::Forest => assert!(g.induces_forest(&r.witness).unwrap()),
            Target::LinearK(k) => assert!(g.induces_linear_k_forest(&r.witness, k).unwrap()),
        }
    }

    #[test]
    fn forest_known_values() {
        let cases = [
            (catalog::complete(5), 2),
            (catalog::cycle(5), 4),
            (catalog::petersen(), 7),
            (catalog::complete_bipartite(3, 3), 4),
            (catalog::path(6), 6),
        ];
        for (g, want) in cases {
            let r = max_induced_forest(&g).unwrap();
            assert_eq!(r.optimum, want);
            assert_witness_ok(&g, &r);
            assert!(r.complete);
        }
    }

    #[test]
    fn linear_known_values() {
        assert_eq!(max_linear_k(&catalog::cycle(7), 3).unwrap().optimum, 5);
        assert_eq!(max_linear_k(&catalog::complete(4), 4).unwrap().optimum, 2);
        assert_eq!(max_linear_k(&catalog::path(4), 1).unwrap().optimum, 3);
        // k = 0 degenerates to maximum independent set.
        assert_eq!(max_linear_k(&catalog::cycle(6), 0).unwrap().optimum, 3);
        // Star: the six leaves alone beat anything through the center.
        assert_eq!(max_linear_k(&catalog::star(7), 5).unwrap().optimum, 6);
    }

    #[test]
    fn agrees_with_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for round in 0..120 {
            let n = 4 + round % 6;
            let mut edges = Vec::new();
            for v in 1..n {
                for u in 0..v {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let r = max_induced_forest(&g).unwrap();
            assert_eq!(r.optimum, oracle::max_forest(&g).0, "n={n} round={round}");
            assert_witness_ok(&g, &r);
            for k in [1, 3, 4] {
                let rk = max_linear_k(&g, k).unwrap();
                assert_eq!(rk.optimum, oracle::max_linear_k(&g, k).0, "k={k} round={round}");
                assert_witness_ok(&g, &rk);
            }
        }
    }

    #[test]
    fn chain_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let n = 5 + (rng.gen::<usize>() % 4);
            let mut edges = Vec::new();
            for v in 1..n {
                for u in 0..v {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let a1 = max_linear_k(&g, 1).unwrap().optimum;
            let a3 = max_linear_k(&g, 3).unwrap().optimum;
            let a4 = max_linear_k(&g, 4).unwrap().optimum;
            let a = max_induced_forest(&g).unwrap().optimum;
            assert!(a1 <= a3 && a3 <= a4 && a4 <= a);
        }
    }

    #[test]
    fn budget_interrupts_with_partial_result() {
        let err = solve(&catalog::petersen(), Target::Forest, Some(2)).unwrap_err();
        match err {
            ExactError::Incomplete(best) => {
                assert!(!best.complete);
                assert!(best.optimum <= 7);
                assert!(catalog::petersen().induces_forest(&best.witness).unwrap());
            }
            other => panic!("expected Incomplete, got {other:?}"),
        }
    }

    #[test]
    fn oversized_graph_is_rejected() {
        let g = Graph::from_edges(65, &[]).unwrap();
        assert!(matches!(
            max_induced_forest(&g),
            Err(ExactError::TooLarge { n: 65, max: 64 })
        ));
    }

    #[test]
    fn empty_and_tiny_graphs() {
        let g0 = Graph::from_edges(0, &[]).unwrap();
        assert_eq!(max_induced_forest(&g0).unwrap().optimum, 0);
        let g1 = Graph::from_edges(1, &[]).unwrap();
        assert_eq!(max_induced_forest(&g1).unwrap().optimum, 1);
        let k2 = catalog::complete(2);
        assert_eq!(max_induced_forest(&k2).unwrap().optimum, 2);
        assert_eq!(max_linear_k(&k2, 0).unwrap().optimum, 1);
    }

    #[test]
    fn report_audit_on_small_catalog() {
        for (g, label) in [
            (catalog::petersen(), "petersen"),
            (catalog::complete(7), "K7"),
            (catalog::cycle(9), "C9"),
            (catalog::complete_bipartite(4, 4), "K44"),
        ] {
            let report = crate::bounds::closed_form_bounds(&g, label).unwrap();
            let checks = verify_bound_against_exact(&g, &report, None).unwrap();
            assert!(!checks.is_empty());
            for c in &checks {
                assert!(c.ok, "{label}: {} gave {} > {}", c.id, c.bound_ceil, c.optimum);
            }
        }
    }

    #[test]
    fn clique_bound_sharp_on_complete_graphs() {
        for n in 2..=9 {
            let g = catalog::complete(n);
            let report = crate::bounds::closed_form_bounds(&g, "K").unwrap();
            let checks = verify_bound_against_exact(&g, &report, None).unwrap();
            let c = checks.iter().find(|c| c.id == "clique_max_degree").unwrap();
            assert_eq!(c.slack, 0, "n={n}");
            assert_eq!(c.optimum, 2);
        }
    }
}
