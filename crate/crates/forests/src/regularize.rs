//! Embedding a graph into a regular host without raising the clique number.
//!
//! Repeatedly double the graph, joining each vertex still short of the
//! target degree to its twin in the fresh copy. A twin edge's endpoints
//! never share a neighbor (their neighborhoods live in disjoint copies),
//! so no triangle appears, and any clique through a cross edge would need
//! such a common neighbor. Degree-floor vertices gain one edge per round,
//! so max degree minus min degree rounds suffice.
//!
//! Bounds proved for regular graphs then transfer back: a large solution
//! in the host meets some copy in at least its average share, and that
//! slice projects to a feasible set in the original graph.

use thiserror::Error;

use crate::bitset::VertexSet;
use crate::graph::Graph;

/// A sensible default ceiling on the host size; callers with more memory
/// can pass their own.
pub const DEFAULT_BLOWUP_CAP: usize = 1 << 16;

#[derive(Debug, Clone)]
pub struct RegularizedGraph {
    pub g_prime: Graph,
    /// Number of copies of the original graph, 2^rounds.
    pub copies: usize,
    /// For each host vertex, its copy index and original vertex id.
    pub copy_map: Vec<(usize, usize)>,
    pub rounds: usize,
}

#[derive(Debug, Error)]
pub enum RegError {
    #[error("graph has no edges, it is already 0-regular")]
    NothingToDo,
    #[error("regularizing needs {needed} host vertices, over the cap of {cap}")]
    BlowupExceeded { needed: u128, cap: usize },
    #[error("invalid host set: {0}")]
    InvalidSet(String),
}

/// Doubles `g` until every vertex reaches the original maximum degree.
/// Host vertex c*n + v is vertex v of copy c.
pub fn regularize(g: &Graph, max_vertices: usize) -> Result<RegularizedGraph, RegError> {
    let n = g.n();
    let dmax = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
    if dmax == 0 {
        return Err(RegError::NothingToDo);
    }
    let dmin = (0..n).map(|v| g.degree(v)).min().unwrap();
    let rounds = dmax - dmin;
    let needed = (n as u128) << rounds.min(100);
    if rounds > 100 || needed > max_vertices as u128 {
        return Err(RegError::BlowupExceeded {
            needed,
            cap: max_vertices,
        });
    }

    let mut edges = g.edges();
    let mut cur_n = n;
    for _ in 0..rounds {
        let mut deg = vec![0usize; cur_n];
        for &(u, v) in &edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut next = Vec::with_capacity(edges.len() * 2 + cur_n);
        for &(u, v) in &edges {
            next.push((u, v));
            next.push((u + cur_n, v + cur_n));
        }
        for (v, &d) in deg.iter().enumerate() {
            if d < dmax {
                next.push((v, v + cur_n));
            }
        }
        edges = next;
        cur_n *= 2;
    }

    let g_prime = Graph::from_edges(cur_n, &edges).expect("doubling keeps edges simple");
    let copies = cur_n / n;
    let copy_map = (0..cur_n).map(|v| (v / n, v % n)).collect();
    Ok(RegularizedGraph {
        g_prime,
        copies,
        copy_map,
        rounds,
    })
}

impl RegularizedGraph {
    fn original_n(&self) -> usize {
        self.g_prime.n() / self.copies
    }

    /// Verifies the construction against its source: the host is regular
    /// at the source's maximum degree, every copy induces the source
    /// exactly, cross edges join twins only, and triangle-freeness
    /// carries over. When `check_clique` is set (meant for small hosts)
    /// the clique numbers are compared too.
    pub fn check_invariants(&self, g: &Graph, check_clique: bool) -> Result<(), String> {
        let gp = &self.g_prime;
        let n = g.n();
        if gp.n() != n * self.copies {
            return Err("host size is not copies * n".into());
        }
        let dmax = (0..n).map(|v| g.degree(v)).max().unwrap_or(0);
        for v in 0..gp.n() {
            if gp.degree(v) != dmax {
                return Err(format!("host vertex {v} has degree {}", gp.degree(v)));
            }
        }
        for (v, &(c, orig)) in self.copy_map.iter().enumerate() {
            if v != c * n + orig {
                return Err(format!("copy map disagrees with the layout at {v}"));
            }
        }
        for c in 0..self.copies {
            for u in 0..n {
                for v in (u + 1)..n {
                    if g.has_edge(u, v) != gp.has_edge(c * n + u, c * n + v) {
                        return Err(format!("copy {c} is not isomorphic to the source"));
                    }
                }
            }
        }
        for (x, y) in gp.edges() {
            if x / n != y / n && x % n != y % n {
                return Err(format!("cross edge ({x},{y}) joins non-twins"));
            }
        }
        if g.is_triangle_free() && !gp.is_triangle_free() {
            return Err("host gained a triangle".into());
        }
        if check_clique && gp.clique_number() != g.clique_number() {
            return Err("host changed the clique number".into());
        }
        Ok(())
    }
}

/// Picks the copy holding the largest share of `s_prime` and projects that
/// share back to original vertex ids. The projection stays feasible (an
/// induced subgraph of a forest is a forest) and, by pigeonhole, has at
/// least |s_prime| / copies vertices.
pub fn extract_best_copy(
    reg: &RegularizedGraph,
    s_prime: &VertexSet,
) -> Result<(usize, VertexSet), RegError> {
    let gp = &reg.g_prime;
    if s_prime.host_n() != gp.n() {
        return Err(RegError::InvalidSet(format!(
            "set lives on {} vertices, host has {}",
            s_prime.host_n(),
            gp.n()
        )));
    }
    if !gp.induces_forest(s_prime).expect("host checked") {
        return Err(RegError::InvalidSet(
            "set does not induce a forest in the host".into(),
        ));
    }
    let n = reg.original_n();
    let mut counts = vec![0usize; reg.copies];
    for v in s_prime.iter() {
        counts[v / n] += 1;
    }
    let best = (0..reg.copies).max_by_key(|&c| counts[c]).unwrap_or(0);
    let mut projected = VertexSet::new(n);
    for v in s_prime.iter() {
        if v / n == best {
            projected.insert(v % n);
        }
    }
    debug_assert!(projected.len() * reg.copies >= s_prime.len());
    Ok((best, projected))
}
