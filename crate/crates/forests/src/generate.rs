//! Graph corpora: a small named catalog, seeded random families, and
//! exhaustive enumerations of tiny graphs.
//!
//! Every random family is driven by a ChaCha stream keyed off its
//! descriptor, so a (family, n, seed) triple always reproduces the same
//! graph byte for byte. Families with a defining predicate (regularity, triangle-freeness,
//! clique ceiling) re-validate the predicate after construction and resample
//! within a bounded retry budget.

use crate::graph::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("family predicate unattainable after {retries} retries: {family}")]
    GenerationFailed { family: String, retries: usize },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Gnp { p: f64 },
    RandomRegular { d: usize },
    BipartiteRandom { p: f64 },
    TriangleFreeRejection { p: f64 },
    KqFreeGreedy { q: usize, target_m: usize },
    Named { id: String },
    ExhaustiveSmall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn label(&self) -> String {
        let fam = match &self.family {
            Family::Gnp { p } => format!("gnp(p={p})"),
            Family::RandomRegular { d } => format!("random_regular(d={d})"),
            Family::BipartiteRandom { p } => format!("bipartite_random(p={p})"),
            Family::TriangleFreeRejection { p } => format!("triangle_free_rejection(p={p})"),
            Family::KqFreeGreedy { q, target_m } => {
                format!("kq_free_greedy(q={q},m={target_m})")
            }
            Family::Named { id } => format!("named({id})"),
            Family::ExhaustiveSmall => "exhaustive_small".to_string(),
        };
        format!("{fam},n={},seed={}", self.n, self.seed)
    }
}

const RETRIES: usize = 2000;

/// Materializes a spec. Sampled families yield one graph; exhaustive_small
/// yields the whole enumeration (use `exhaustive_edge_subsets` directly to
/// stream n = 7 instead of collecting two million graphs).
pub fn generate(spec: &GeneratorSpec) -> Result<Vec<Graph>, GenError> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match &spec.family {
        Family::Gnp { p } => Ok(vec![gnp(n, *p, &mut rng)]),
        Family::BipartiteRandom { p } => Ok(vec![bipartite_random(n, *p, &mut rng)]),
        Family::RandomRegular { d } => random_regular(n, *d, &mut rng).map(|g| vec![g]),
        Family::TriangleFreeRejection { p } => {
            for _ in 0..RETRIES {
                let g = gnp(n, *p, &mut rng);
                if g.is_triangle_free() {
                    return Ok(vec![g]);
                }
            }
            Err(GenError::GenerationFailed {
                family: spec.label(),
                retries: RETRIES,
            })
        }
        Family::KqFreeGreedy { q, target_m } => {
            kq_free_greedy(n, *q, *target_m, &mut rng).map(|g| vec![g])
        }
        Family::Named { id } => named(id, n).map(|g| vec![g]),
        Family::ExhaustiveSmall => {
            if n > 7 {
                return Err(GenError::InvalidSpec(format!(
                    "exhaustive_small supports n <= 7, got {n}"
                )));
            }
            Ok(exhaustive_edge_subsets(n).collect())
        }
    }
}

fn gnp(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

fn bipartite_random(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let left = n / 2;
    let mut edges = Vec::new();
    for u in 0..left {
        for v in left..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Configuration-model pairing with whole-attempt rejection of loops and
/// parallel edges.
fn random_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<Graph, GenError> {
    if !(n * d).is_multiple_of(2) || d >= n {
        return Err(GenError::InvalidSpec(format!(
            "random_regular needs d < n and n*d even, got n={n} d={d}"
        )));
    }
    'attempt: for _ in 0..RETRIES {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        stubs.shuffle(rng);
        let mut edges = Vec::with_capacity(n * d / 2);
        let mut seen = std::collections::HashSet::new();
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || !seen.insert((u.min(v), u.max(v))) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        debug_assert!(g.is_regular() && g.max_degree() == d);
        return Ok(g);
    }
    Err(GenError::GenerationFailed {
        family: format!("random_regular(d={d}),n={n}"),
        retries: RETRIES,
    })
}

/// Adds random edges while the clique number stays below q, until target_m
/// edges are placed or the attempt budget runs out.
fn kq_free_greedy(
    n: usize,
    q: usize,
    target_m: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Graph, GenError> {
    if q < 3 {
        return Err(GenError::InvalidSpec("kq_free_greedy needs q >= 3".into()));
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut adj = vec![crate::bitset::VertexSet::new(n); n];
    let budget = RETRIES.max(60 * n * n);
    let mut attempts = 0;
    while edges.len() < target_m && attempts < budget {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v || adj[u].contains(v) {
            continue;
        }
        // (u,v) completes a K_q exactly when the common neighborhood
        // contains a clique on q-2 vertices.
        let common = adj[u].intersection(&adj[v]);
        let mut creates = false;
        if common.len() >= q - 2 {
            let members: Vec<usize> = common.to_vec();
            let mut relabeled = Vec::new();
            for (i, &a) in members.iter().enumerate() {
                for (j, &b) in members.iter().enumerate().skip(i + 1) {
                    if adj[a].contains(b) {
                        relabeled.push((i, j));
                    }
                }
            }
            let sub = Graph::from_edges(members.len(), &relabeled).unwrap();
            creates = sub.clique_number() >= q - 2;
        }
        if !creates {
            adj[u].insert(v);
            adj[v].insert(u);
            edges.push((u, v));
        }
    }
    if edges.len() < target_m {
        return Err(GenError::GenerationFailed {
            family: format!("kq_free_greedy(q={q},m={target_m}),n={n}"),
            retries: attempts,
        });
    }
    let g = Graph::from_edges(n, &edges).unwrap();
    debug_assert!(g.clique_number() < q);
    Ok(g)
}

fn named(id: &str, n: usize) -> Result<Graph, GenError> {
    match id {
        "petersen" => Ok(catalog::petersen()),
        "k55_minus_pm" => Ok(catalog::k55_minus_pm()),
        "complete" => Ok(catalog::complete(n)),
        "complete_bipartite" => Ok(catalog::complete_bipartite(n / 2, n - n / 2)),
        "cycle" => {
            if n < 3 {
                return Err(GenError::InvalidSpec("cycle needs n >= 3".into()));
            }
            Ok(catalog::cycle(n))
        }
        "path" => Ok(catalog::path(n)),
        "star" => Ok(catalog::star(n)),
        other => Err(GenError::InvalidSpec(format!("unknown catalog id {other}"))),
    }
}

/// Streams every labeled graph on n vertices (all 2^C(n,2) edge subsets).
pub fn exhaustive_edge_subsets(n: usize) -> impl Iterator<Item = Graph> {
    assert!(n <= 7, "edge-subset enumeration is for n <= 7");
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    let count: u64 = 1 << pairs.len();
    (0..count).map(move |mask| {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    })
}

/// Visits every labeled triangle-free graph on exactly n vertices. Vertices
/// are added one at a time; a new vertex may only attach to an independent
/// set of its predecessors, which prunes the enumeration to triangle-free
/// prefixes.
pub fn for_each_triangle_free<F: FnMut(&Graph)>(n: usize, mut f: F) {
    assert!(n <= 10, "triangle-free enumeration is exponential; keep n small");
    let mut adj = vec![0u64; n];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    fn place_vertex<F: FnMut(&Graph)>(
        v: usize,
        n: usize,
        adj: &mut Vec<u64>,
        edges: &mut Vec<(usize, usize)>,
        f: &mut F,
    ) {
        if v == n {
            f(&Graph::from_edges(n, edges).unwrap());
            return;
        }
        // Choose the neighbor mask of v among 0..v bit by bit; bits adjacent
        // to an already chosen bit would close a triangle and are skipped.
        #[allow(clippy::too_many_arguments)]
        fn choose_bits<F: FnMut(&Graph)>(
            bit: usize,
            v: usize,
            n: usize,
            chosen: u64,
            forbidden: u64,
            adj: &mut Vec<u64>,
            edges: &mut Vec<(usize, usize)>,
            f: &mut F,
        ) {
            if bit == v {
                let added = chosen.count_ones() as usize;
                let mut w = chosen;
                while w != 0 {
                    let u = w.trailing_zeros() as usize;
                    w &= w - 1;
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                    edges.push((u, v));
                }
                place_vertex(v + 1, n, adj, edges, f);
                for _ in 0..added {
                    let (u, _) = edges.pop().unwrap();
                    adj[u] &= !(1 << v);
                }
                adj[v] = 0;
                return;
            }
            choose_bits(bit + 1, v, n, chosen, forbidden, adj, edges, f);
            if forbidden >> bit & 1 == 0 {
                choose_bits(
                    bit + 1,
                    v,
                    n,
                    chosen | 1 << bit,
                    forbidden | adj[bit],
                    adj,
                    edges,
                    f,
                );
            }
        }
        choose_bits(0, v, n, 0, 0, adj, edges, f);
    }
    place_vertex(0, n, &mut adj, &mut edges, &mut f);
}

pub mod catalog {
    use crate::graph::Graph;

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (0..a)
            .flat_map(|u| (a..a + b).map(move |v| (u, v)))
            .collect();
        Graph::from_edges(a + b, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    /// Star on n vertices: center 0, n-1 leaves.
    pub fn star(n: usize) -> Graph {
        assert!(n >= 1);
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (0, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    /// Outer 5-cycle 0..4, inner pentagram 5..9, spokes i -- i+5.
    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Graph::from_edges(10, &edges).unwrap()
    }

    /// K_{5,5} minus a perfect matching: parts 0..4 and 5..9, i !~ 5+i.
    pub fn k55_minus_pm() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    edges.push((i, 5 + j));
                }
            }
        }
        Graph::from_edges(10, &edges).unwrap()
    }
}
