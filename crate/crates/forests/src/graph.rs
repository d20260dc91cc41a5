//! Simple undirected graphs with dense bit-row adjacency.
//!
//! Everything downstream (bounds, search, exact solving) works at desk scale
//! (a few hundred vertices), so each vertex keeps its neighborhood as a
//! `VertexSet` and degree queries are cached. Graphs are immutable after
//! construction; algorithms that "delete" vertices track an alive-set
//! instead of rebuilding.

use crate::bitset::VertexSet;
use crate::ratio::{rat_int, Rat};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({u},{v}) invalid for graph on {n} vertices")]
    InvalidEdge { u: usize, v: usize, n: usize },
    #[error("vertex set over {set_n} vertices used with graph on {graph_n}")]
    HostMismatch { set_n: usize, graph_n: usize },
    #[error("set does not induce a forest")]
    NotAForest,
    #[error("vertex {0} is not in the set")]
    VertexNotInSet(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<VertexSet>,
    degree: Vec<usize>,
}

/// Exact structural summary. `omega` is the clique number computed by branch
/// and bound, not a heuristic; `avg_degree` is the exact rational 2m/n.
#[derive(Debug, Clone, Serialize)]
pub struct GraphStats {
    pub delta_max: usize,
    pub delta_min: usize,
    pub omega: usize,
    pub triangle_free: bool,
    #[serde(serialize_with = "crate::ratio::serialize_rat")]
    pub avg_degree: Rat,
}

/// Per-tree summary of one component of an induced forest: edge count,
/// maximum degree inside the tree, diameter, and the number of vertex pairs
/// realizing the diameter. A singleton tree reports (0, 0, 0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeStats {
    pub vertices: VertexSet,
    pub edge_count: usize,
    pub max_degree: usize,
    pub diameter: usize,
    pub diameter_pairs: usize,
}

/// Outside-vertex census of a set S: `sets[i]` holds the vertices of V minus S
/// with exactly i neighbors in S.
#[derive(Debug, Clone)]
pub struct BetaCounts {
    host_n: usize,
    sets: BTreeMap<usize, VertexSet>,
}

impl Serialize for BetaCounts {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = ser.serialize_map(Some(self.sets.len()))?;
        for (i, set) in &self.sets {
            map.serialize_entry(&i.to_string(), &set.to_vec())?;
        }
        map.end()
    }
}

impl BetaCounts {
    pub fn count(&self, i: usize) -> usize {
        self.sets.get(&i).map_or(0, VertexSet::len)
    }

    pub fn witnesses(&self, i: usize) -> Option<&VertexSet> {
        self.sets.get(&i)
    }

    pub fn witnesses_or_empty(&self, i: usize) -> VertexSet {
        self.sets
            .get(&i)
            .cloned()
            .unwrap_or_else(|| VertexSet::new(self.host_n))
    }

    pub fn total(&self) -> usize {
        self.sets.values().map(VertexSet::len).sum()
    }

    /// Sum of i * beta_i, i.e. the number of edges leaving S.
    pub fn weighted_total(&self) -> usize {
        self.sets.iter().map(|(i, s)| i * s.len()).sum()
    }

    pub fn count_at_least(&self, i: usize) -> usize {
        self.sets
            .range(i..)
            .map(|(_, s)| s.len())
            .sum()
    }

    pub fn nonempty_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.sets.keys().copied()
    }
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) are collapsed; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut adj = vec![VertexSet::new(n); n];
        let mut m = 0;
        for &(u, v) in edges {
            if u == v || u >= n || v >= n {
                return Err(GraphError::InvalidEdge { u, v, n });
            }
            if !adj[u].contains(v) {
                adj[u].insert(v);
                adj[v].insert(u);
                m += 1;
            }
        }
        let degree = adj.iter().map(VertexSet::len).collect();
        Ok(Graph { n, m, adj, degree })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v]
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    /// Edges as (u, v) with u < v, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for v in self.adj[u].iter() {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    fn check_host(&self, s: &VertexSet) -> Result<(), GraphError> {
        if s.host_n() != self.n {
            return Err(GraphError::HostMismatch {
                set_n: s.host_n(),
                graph_n: self.n,
            });
        }
        Ok(())
    }

    pub fn degree_within(&self, s: &VertexSet, v: usize) -> usize {
        self.adj[v].intersection_count(s)
    }

    /// Number of edges of the subgraph induced by `s`.
    pub fn edge_count_within(&self, s: &VertexSet) -> usize {
        let total: usize = s.iter().map(|v| self.degree_within(s, v)).sum();
        total / 2
    }

    /// d°(v) = neighbors of v outside S. `v` must belong to `s`.
    pub fn outside_degree(&self, s: &VertexSet, v: usize) -> Result<usize, GraphError> {
        self.check_host(s)?;
        if !s.contains(v) {
            return Err(GraphError::VertexNotInSet(v));
        }
        Ok(self.degree[v] - self.degree_within(s, v))
    }

    /// Connected components of the subgraph induced by `s`, each as a
    /// vertex set, ordered by smallest member.
    pub fn components_within(&self, s: &VertexSet) -> Vec<VertexSet> {
        let mut seen = VertexSet::new(self.n);
        let mut out = Vec::new();
        for start in s.iter() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = VertexSet::new(self.n);
            let mut stack = vec![start];
            comp.insert(start);
            seen.insert(start);
            while let Some(v) = stack.pop() {
                for u in self.adj[v].intersection(s).iter() {
                    if !comp.contains(u) {
                        comp.insert(u);
                        seen.insert(u);
                        stack.push(u);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// The subgraph induced by `s`, relabeled to 0..|s| in ascending order
    /// of original ids. The second component maps each new id back to the
    /// original vertex.
    pub fn induced_subgraph(&self, s: &VertexSet) -> (Graph, Vec<usize>) {
        let members = s.to_vec();
        let mut idx = vec![usize::MAX; self.n];
        for (i, &v) in members.iter().enumerate() {
            idx[v] = i;
        }
        let mut edges = Vec::new();
        for &v in &members {
            for u in self.adj[v].intersection(s).iter() {
                if u < v {
                    edges.push((idx[u], idx[v]));
                }
            }
        }
        let sub = Graph::from_edges(members.len(), &edges)
            .expect("relabeled edges are simple by construction");
        (sub, members)
    }

    /// Does `s` induce a forest? Decided by union-find over the induced
    /// edges.
    pub fn induces_forest(&self, s: &VertexSet) -> Result<bool, GraphError> {
        self.check_host(s)?;
        let mut dsu = Dsu::new(self.n);
        for v in s.iter() {
            for u in self.adj[v].intersection(s).iter() {
                if u > v && !dsu.union(u, v) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Does `s` induce a disjoint union of paths, each with at most `k`
    /// edges? Isolated vertices count as paths with 0 edges.
    pub fn induces_linear_k_forest(&self, s: &VertexSet, k: usize) -> Result<bool, GraphError> {
        self.check_host(s)?;
        for v in s.iter() {
            if self.degree_within(s, v) > 2 {
                return Ok(false);
            }
        }
        for comp in self.components_within(s) {
            let e = self.edge_count_within(&comp);
            if e + 1 != comp.len() || e > k {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Classifies every outside vertex by its number of neighbors in `s`.
    pub fn beta_counts(&self, s: &VertexSet) -> Result<BetaCounts, GraphError> {
        self.check_host(s)?;
        let mut sets: BTreeMap<usize, VertexSet> = BTreeMap::new();
        for u in 0..self.n {
            if s.contains(u) {
                continue;
            }
            let i = self.degree_within(s, u);
            sets.entry(i)
                .or_insert_with(|| VertexSet::new(self.n))
                .insert(u);
        }
        Ok(BetaCounts {
            host_n: self.n,
            sets,
        })
    }

    /// Splits an induced forest into its trees with full per-tree stats.
    /// Fails with `NotAForest` when `s` has an induced cycle.
    pub fn tree_decomposition(&self, s: &VertexSet) -> Result<Vec<TreeStats>, GraphError> {
        if !self.induces_forest(s)? {
            return Err(GraphError::NotAForest);
        }
        let mut out = Vec::new();
        for comp in self.components_within(s) {
            out.push(self.tree_stats(&comp));
        }
        Ok(out)
    }

    /// Stats for one tree component (caller guarantees `comp` is a connected
    /// induced tree). All-pairs BFS; trees here are small.
    pub(crate) fn tree_stats(&self, comp: &VertexSet) -> TreeStats {
        let size = comp.len();
        if size == 1 {
            return TreeStats {
                vertices: comp.clone(),
                edge_count: 0,
                max_degree: 0,
                diameter: 0,
                diameter_pairs: 1,
            };
        }
        let members: Vec<usize> = comp.to_vec();
        let mut max_degree = 0;
        for &v in &members {
            max_degree = max_degree.max(self.degree_within(comp, v));
        }
        let mut diameter = 0;
        let mut diameter_pairs = 0;
        let mut dist: Vec<usize> = vec![usize::MAX; self.n];
        for (i, &src) in members.iter().enumerate() {
            for &v in &members {
                dist[v] = usize::MAX;
            }
            dist[src] = 0;
            let mut queue = std::collections::VecDeque::from([src]);
            while let Some(v) = queue.pop_front() {
                for u in self.adj[v].intersection(comp).iter() {
                    if dist[u] == usize::MAX {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
            for &v in &members[i + 1..] {
                if dist[v] > diameter {
                    diameter = dist[v];
                    diameter_pairs = 1;
                } else if dist[v] == diameter {
                    diameter_pairs += 1;
                }
            }
        }
        TreeStats {
            vertices: comp.clone(),
            edge_count: size - 1,
            max_degree,
            diameter,
            diameter_pairs,
        }
    }

    pub fn is_triangle_free(&self) -> bool {
        for v in 0..self.n {
            for u in self.adj[v].iter() {
                if u > v && self.adj[u].intersects(&self.adj[v]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_regular(&self) -> bool {
        self.n == 0 || self.degree.iter().all(|&d| d == self.degree[0])
    }

    pub fn max_degree(&self) -> usize {
        self.degree.iter().copied().max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.degree.iter().copied().min().unwrap_or(0)
    }

    /// Exact clique number via branch and bound with a greedy-coloring
    /// bound. Empty graph: 0, edgeless: 1.
    pub fn clique_number(&self) -> usize {
        if self.n == 0 {
            return 0;
        }
        if self.m == 0 {
            return 1;
        }
        let mut best = 1;
        let full = VertexSet::full(self.n);
        self.clique_expand(&full, 0, &mut best);
        best
    }

    fn clique_expand(&self, p: &VertexSet, size: usize, best: &mut usize) {
        if p.is_empty() {
            *best = (*best).max(size);
            return;
        }
        // Greedy coloring of P: vertices in class c can only extend a clique
        // by one vertex per class, so size + class index is an upper bound.
        let members: Vec<usize> = p.to_vec();
        let mut classes: Vec<VertexSet> = Vec::new();
        let mut colored: Vec<(usize, usize)> = Vec::with_capacity(members.len());
        for &v in &members {
            let mut c = 0;
            while c < classes.len() && classes[c].intersects(&self.adj[v]) {
                c += 1;
            }
            if c == classes.len() {
                classes.push(VertexSet::new(self.n));
            }
            classes[c].insert(v);
            colored.push((v, c + 1));
        }
        // Branch from the highest color down; once size + color can no
        // longer beat the incumbent, nothing later in the order can either.
        colored.sort_by_key(|&(_, c)| c);
        let mut p = p.clone();
        for &(v, color) in colored.iter().rev() {
            if size + color <= *best {
                return;
            }
            let next = p.intersection(&self.adj[v]);
            self.clique_expand(&next, size + 1, best);
            p.remove(v);
        }
    }

    pub fn stats(&self) -> GraphStats {
        let avg_degree = if self.n == 0 {
            rat_int(0)
        } else {
            crate::ratio::rat(2 * self.m as i64, self.n as i64)
        };
        GraphStats {
            delta_max: self.max_degree(),
            delta_min: self.min_degree(),
            omega: self.clique_number(),
            triangle_free: self.is_triangle_free(),
            avg_degree,
        }
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = v;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns false when both endpoints were already connected.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::catalog;

    fn k(n: usize) -> Graph {
        catalog::complete(n)
    }

    fn cycle(n: usize) -> Graph {
        catalog::cycle(n)
    }

    #[test]
    fn induced_subgraph_relabels_in_order() {
        let g = catalog::petersen();
        let mut s = VertexSet::new(10);
        for v in [1, 4, 6, 9] {
            s.insert(v);
        }
        let (sub, members) = g.induced_subgraph(&s);
        assert_eq!(members, vec![1, 4, 6, 9]);
        assert_eq!(sub.n(), 4);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(
                    sub.has_edge(a, b),
                    g.has_edge(members[a], members[b]),
                    "edge mismatch at ({a},{b})"
                );
            }
        }
    }

    #[test]
    fn from_edges_dedups_and_counts() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 0), (2, 3)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.degree(0), 1);
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(g.m(), 3);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert_eq!(
            Graph::from_edges(2, &[(0, 0)]),
            Err(GraphError::InvalidEdge { u: 0, v: 0, n: 2 })
        );
        assert!(Graph::from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn single_vertex_graph() {
        let g = Graph::from_edges(1, &[]).unwrap();
        assert_eq!((g.n(), g.m()), (1, 0));
        let st = g.stats();
        assert_eq!(st.omega, 1);
        assert!(st.triangle_free);
    }

    #[test]
    fn empty_graph_stats_are_zero() {
        let g = Graph::from_edges(0, &[]).unwrap();
        let st = g.stats();
        assert_eq!((st.delta_max, st.delta_min, st.omega), (0, 0, 0));
        assert_eq!(st.avg_degree, rat_int(0));
    }

    #[test]
    fn stats_on_small_graphs() {
        let st = k(4).stats();
        assert_eq!(st.delta_max, 3);
        assert_eq!(st.omega, 4);
        assert!(!st.triangle_free);

        let st = cycle(5).stats();
        assert_eq!((st.delta_max, st.delta_min, st.omega), (2, 2, 2));
        assert!(st.triangle_free);
        assert_eq!(st.avg_degree, crate::ratio::rat(2, 1));
    }

    #[test]
    fn petersen_stats() {
        let st = catalog::petersen().stats();
        assert_eq!(st.delta_max, 3);
        assert_eq!(st.delta_min, 3);
        assert_eq!(st.omega, 2);
        assert!(st.triangle_free);
        assert_eq!(st.avg_degree, rat_int(3));
    }

    #[test]
    fn clique_number_agrees_with_oracle_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=9);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            assert_eq!(g.clique_number(), crate::oracle::clique_number(&g));
        }
    }

    #[test]
    fn forest_checks_on_k3() {
        let g = k(3);
        let all = VertexSet::full(3);
        assert!(!g.induces_forest(&all).unwrap());
        let pair = VertexSet::from_members(3, [0, 1]);
        assert!(g.induces_forest(&pair).unwrap());
    }

    #[test]
    fn every_four_subset_of_c5_is_a_forest() {
        let g = cycle(5);
        for skip in 0..5 {
            let s = VertexSet::from_members(5, (0..5).filter(|&v| v != skip));
            assert!(g.induces_forest(&s).unwrap());
        }
        assert!(!g.induces_forest(&VertexSet::full(5)).unwrap());
    }

    #[test]
    fn host_mismatch_is_detected() {
        let g = cycle(5);
        let s = VertexSet::full(4);
        assert_eq!(
            g.induces_forest(&s),
            Err(GraphError::HostMismatch {
                set_n: 4,
                graph_n: 5
            })
        );
    }

    #[test]
    fn linear_forest_checks() {
        // C7 minus vertices 0 and 3: paths on {1,2} and {4,5,6}.
        let g = cycle(7);
        let s = VertexSet::from_members(7, [1, 2, 4, 5, 6]);
        assert!(g.induces_linear_k_forest(&s, 3).unwrap());
        assert!(g.induces_linear_k_forest(&s, 2).unwrap());
        assert!(!g.induces_linear_k_forest(&s, 1).unwrap());

        // A star center has degree 3: not linear for any k.
        let star = catalog::star(4);
        let all = VertexSet::full(4);
        for k in [1, 3, 4, 10] {
            assert!(!star.induces_linear_k_forest(&all, k).unwrap());
        }

        let empty = VertexSet::new(7);
        assert!(g.induces_linear_k_forest(&empty, 1).unwrap());
    }

    #[test]
    fn beta_counts_examples() {
        let g = k(4);
        let s = VertexSet::from_members(4, [0, 1]);
        let b = g.beta_counts(&s).unwrap();
        assert_eq!(b.count(2), 2);
        assert_eq!(b.total(), 2);

        let g = cycle(5);
        let s = VertexSet::from_members(5, [0, 1, 2]);
        let b = g.beta_counts(&s).unwrap();
        assert_eq!(b.count(1), 2);
        assert_eq!(b.count(2), 0);

        let b = g.beta_counts(&VertexSet::full(5)).unwrap();
        assert_eq!(b.total(), 0);
    }

    #[test]
    fn beta_identity_on_random_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = catalog::petersen();
        for _ in 0..100 {
            let s = VertexSet::from_members(10, (0..10).filter(|_| rng.gen_bool(0.5)));
            let b = g.beta_counts(&s).unwrap();
            assert_eq!(b.total(), g.n() - s.len());
            let boundary: usize = s
                .iter()
                .map(|v| g.outside_degree(&s, v).unwrap())
                .sum();
            assert_eq!(b.weighted_total(), boundary);
        }
    }

    #[test]
    fn tree_stats_for_path_star_singleton() {
        let p4 = catalog::path(4);
        let t = &p4.tree_decomposition(&VertexSet::full(4)).unwrap()[0];
        assert_eq!((t.edge_count, t.max_degree, t.diameter, t.diameter_pairs), (3, 2, 3, 1));

        let star = catalog::star(4);
        let t = &star.tree_decomposition(&VertexSet::full(4)).unwrap()[0];
        assert_eq!((t.edge_count, t.max_degree, t.diameter, t.diameter_pairs), (3, 3, 2, 3));

        let g = Graph::from_edges(1, &[]).unwrap();
        let t = &g.tree_decomposition(&VertexSet::full(1)).unwrap()[0];
        assert_eq!((t.edge_count, t.max_degree, t.diameter, t.diameter_pairs), (0, 0, 0, 1));
    }

    #[test]
    fn tree_decomposition_rejects_cycles() {
        let g = k(3);
        assert_eq!(
            g.tree_decomposition(&VertexSet::full(3)),
            Err(GraphError::NotAForest)
        );
    }

    #[test]
    fn outside_degree_examples() {
        let g = k(4);
        let s = VertexSet::from_members(4, [0, 1]);
        assert_eq!(g.outside_degree(&s, 0).unwrap(), 2);
        assert_eq!(
            g.outside_degree(&s, 2),
            Err(GraphError::VertexNotInSet(2))
        );

        let g = cycle(5);
        assert_eq!(g.outside_degree(&VertexSet::full(5), 3).unwrap(), 0);

        let p = catalog::petersen();
        let outer = VertexSet::from_members(10, 0..5);
        for v in 0..5 {
            assert_eq!(p.outside_degree(&outer, v).unwrap(), 1);
        }
    }

    #[test]
    fn handshake_on_random_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(0..=12);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.3) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let total: usize = (0..n).map(|v| g.degree(v)).sum();
            assert_eq!(total, 2 * g.m());
        }
    }

    #[test]
    fn forest_check_agrees_with_dfs_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let n = rng.gen_range(1..=10);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.35) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, &edges).unwrap();
            let s = VertexSet::from_members(n, (0..n).filter(|_| rng.gen_bool(0.6)));
            assert_eq!(
                g.induces_forest(&s).unwrap(),
                crate::oracle::is_forest_dfs(&g, &s)
            );
        }
    }
}
