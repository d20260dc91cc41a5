//! Lexicographic exchange search over induced forests and linear forests.
//!
//! Three variants share one engine. Each keeps a feasible vertex set S and
//! greedily applies exchange moves (remove up to 3 vertices of S, add up to
//! 2 outside vertices) that strictly raise the variant's objective tuple:
//!
//! * `K4` keeps an induced forest and orders states by
//!   (|S|, e(S), #degree-1 vertices, sum of per-tree max degrees,
//!   -sum of per-tree diametral pair counts).
//! * `Kq(q)` keeps an induced linear 4-forest ordered by
//!   (3|S| - e(S), #degree-0 vertices).
//! * `A3` keeps an induced linear 3-forest ordered by
//!   (|S|, -e(S), #degree-1 vertices).
//!
//! Shapes that provably cannot raise the leading terms are skipped: for K4
//! and A3 the first term is |S|, so any move with more removals than
//! additions loses outright; for Kq the first term is 3|S| - e(S) and a
//! pure removal of r vertices costs 3r while recovering at most 2r edge
//! units, so pure removals lose there too. Adding two vertices at once is
//! also dropped, because feasibility is hereditary: whenever S + {v, w}
//! works, S + {v} already works and grows |S|.
//!
//! At a local optimum the structural facts the objective ordering forces
//! (no outside vertex with fewer than two S-neighbors, caps on how many
//! two-neighbor outsiders a tree or path can support, and so on) are
//! checked by `certify`, and `counting_bound` reruns the double-counting
//! argument those facts feed to turn the certified state into an explicit
//! rational floor on |S|.

use crate::bitset::VertexSet;
use crate::bounds::Target;
use crate::graph::{BetaCounts, Graph, TreeStats};
use crate::ratio::{ceil_i64, rat, rat_int, rat_usize, Rat};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexVariant {
    K4,
    Kq(usize),
    A3,
}

impl LexVariant {
    pub fn id(&self) -> String {
        match self {
            LexVariant::K4 => "k4".to_string(),
            LexVariant::Kq(q) => format!("kq:{q}"),
            LexVariant::A3 => "a3".to_string(),
        }
    }

    /// Parses the CLI spelling: "k4", "a3", or "kq:<q>".
    pub fn parse(txt: &str) -> Option<LexVariant> {
        match txt {
            "k4" => Some(LexVariant::K4),
            "a3" => Some(LexVariant::A3),
            _ => txt
                .strip_prefix("kq:")
                .and_then(|q| q.parse().ok())
                .map(LexVariant::Kq),
        }
    }

    pub fn target(&self) -> Target {
        match self {
            LexVariant::K4 => Target::Forest,
            LexVariant::Kq(_) => Target::LinearK(4),
            LexVariant::A3 => Target::LinearK(3),
        }
    }

    pub fn feasible(&self, g: &Graph, s: &VertexSet) -> bool {
        match self {
            LexVariant::K4 => g.induces_forest(s).unwrap_or(false),
            LexVariant::Kq(_) => g.induces_linear_k_forest(s, 4).unwrap_or(false),
            LexVariant::A3 => g.induces_linear_k_forest(s, 3).unwrap_or(false),
        }
    }

    pub fn objective(&self, g: &Graph, s: &VertexSet) -> Vec<i64> {
        let size = s.len() as i64;
        let e = g.edge_count_within(s) as i64;
        match self {
            LexVariant::K4 => {
                let trees = g.tree_decomposition(s).expect("state must induce a forest");
                let d1 = s.iter().filter(|&v| g.degree_within(s, v) == 1).count() as i64;
                let sum_delta: i64 = trees.iter().map(|t| t.max_degree as i64).sum();
                let sum_pairs: i64 = trees.iter().map(|t| t.diameter_pairs as i64).sum();
                vec![size, e, d1, sum_delta, -sum_pairs]
            }
            LexVariant::Kq(_) => {
                let d0 = s.iter().filter(|&v| g.degree_within(s, v) == 0).count() as i64;
                vec![3 * size - e, d0]
            }
            LexVariant::A3 => {
                let d1 = s.iter().filter(|&v| g.degree_within(s, v) == 1).count() as i64;
                vec![size, -e, d1]
            }
        }
    }

    fn shapes(&self) -> &'static [(usize, usize)] {
        match self {
            LexVariant::K4 | LexVariant::A3 => &[(0, 1), (1, 1), (1, 2), (2, 2)],
            LexVariant::Kq(_) => &[(0, 1), (1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)],
        }
    }

    pub fn check_applicable(&self, g: &Graph) -> Result<(), SearchError> {
        match self {
            LexVariant::K4 => {
                let w = g.clique_number();
                if w > 3 {
                    return Err(SearchError::VariantNotApplicable(format!(
                        "forest exchange needs clique number at most 3, graph has {w}"
                    )));
                }
            }
            LexVariant::Kq(q) => {
                if *q < 5 {
                    return Err(SearchError::VariantNotApplicable(format!(
                        "clique parameter must be at least 5, got {q}"
                    )));
                }
                let w = g.clique_number();
                if w >= *q {
                    return Err(SearchError::VariantNotApplicable(format!(
                        "graph has a clique of size {w}, at least the parameter {q}"
                    )));
                }
            }
            LexVariant::A3 => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Move {
    pub remove: VertexSet,
    pub add: VertexSet,
}

impl Move {
    pub fn apply(&self, s: &mut VertexSet) {
        for v in self.remove.iter() {
            s.remove(v);
        }
        for v in self.add.iter() {
            s.insert(v);
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchState {
    pub variant_id: String,
    pub s: VertexSet,
    pub objective_vector: Vec<i64>,
    pub beta: BetaCounts,
    pub trees: Vec<TreeStats>,
    pub move_log: Vec<Move>,
    pub converged: bool,
}

impl SearchState {
    /// Wraps an existing feasible set as a (not yet converged) state.
    pub fn from_set(g: &Graph, variant: &LexVariant, s: VertexSet) -> Result<Self, SearchError> {
        if s.host_n() != g.n() {
            return Err(SearchError::InvalidSeed(format!(
                "seed lives on {} vertices, graph has {}",
                s.host_n(),
                g.n()
            )));
        }
        if !variant.feasible(g, &s) {
            return Err(SearchError::InvalidSeed(format!(
                "seed {s} does not induce the required structure"
            )));
        }
        let mut state = SearchState {
            variant_id: variant.id(),
            s,
            objective_vector: Vec::new(),
            beta: g.beta_counts(&VertexSet::new(g.n())).expect("host ok"),
            trees: Vec::new(),
            move_log: Vec::new(),
            converged: false,
        };
        state.refresh(g, variant);
        Ok(state)
    }

    fn refresh(&mut self, g: &Graph, variant: &LexVariant) {
        self.objective_vector = variant.objective(g, &self.s);
        self.beta = g.beta_counts(&self.s).expect("host ok");
        self.trees = g.tree_decomposition(&self.s).expect("state induces a forest");
    }
}

#[derive(Debug, Clone)]
pub struct SearchLimits {
    pub max_moves: u64,
    pub max_millis: Option<u64>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_moves: 100_000,
            max_millis: None,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SearchOptions {
    pub limits: SearchLimits,
    /// Enumerate every outside vertex as an add candidate and every S
    /// vertex as a remove candidate, instead of the distance-limited pools.
    pub full_radius: bool,
    /// Shuffle candidate orders reproducibly; None keeps ascending order.
    pub order_seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid seed: {0}")]
    InvalidSeed(String),
    #[error("variant not applicable: {0}")]
    VariantNotApplicable(String),
    #[error("search limits hit after {} moves (size {})", .0.move_log.len(), .0.s.len())]
    Incomplete(Box<SearchState>),
    #[error("state not certified: {0}")]
    NotCertified(String),
    #[error("counting argument does not close on this state: {0}")]
    ChainFailed(String),
}

/// Add candidates: outside vertices with at most 3 neighbors in S (every
/// useful exchange partner has 2 or 3; vertices seeing 0 or 1 witness a
/// missing pure addition). Remove candidates: S vertices within distance 2
/// of some add candidate. `full_radius` lifts both restrictions.
fn build_pools(g: &Graph, s: &VertexSet, full_radius: bool) -> (Vec<usize>, Vec<usize>) {
    let mut adds = Vec::new();
    for v in 0..g.n() {
        if !s.contains(v) && (full_radius || g.degree_within(s, v) <= 3) {
            adds.push(v);
        }
    }
    let removes = if full_radius {
        s.to_vec()
    } else {
        let mut near = VertexSet::new(g.n());
        for &v in &adds {
            near.union_with(g.neighbors(v));
        }
        let ring1 = near.clone();
        for u in ring1.iter() {
            near.union_with(g.neighbors(u));
        }
        s.intersection(&near).to_vec()
    };
    (adds, removes)
}

/// Visits all m-subsets of `pool` in enumeration order until `f` says stop.
fn each_combo(pool: &[usize], m: usize, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(
        pool: &[usize],
        m: usize,
        start: usize,
        buf: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if buf.len() == m {
            return f(buf);
        }
        let need = m - buf.len();
        if pool.len() < start + need {
            return false;
        }
        for i in start..=pool.len() - need {
            buf.push(pool[i]);
            if rec(pool, m, i + 1, buf, f) {
                return true;
            }
            buf.pop();
        }
        false
    }
    rec(pool, m, 0, &mut Vec::with_capacity(m), f)
}

enum Prefix {
    Better,
    Tie,
    Worse,
}

/// Cheap leading-term delta, before any set is built. Only moves whose
/// leading terms cannot lose proceed to the feasibility check.
fn prefix_delta(
    g: &Graph,
    variant: &LexVariant,
    s: &VertexSet,
    rset: &[usize],
    aset: &[usize],
) -> Prefix {
    let mut edges_lost: i64 = 0;
    for (i, &x) in rset.iter().enumerate() {
        edges_lost += g.degree_within(s, x) as i64;
        for &y in &rset[..i] {
            if g.has_edge(x, y) {
                edges_lost -= 1;
            }
        }
    }
    let mut edges_gained: i64 = 0;
    for (i, &v) in aset.iter().enumerate() {
        let mut c = g.neighbors(v).intersection_count(s) as i64;
        for &x in rset {
            if g.has_edge(v, x) {
                c -= 1;
            }
        }
        edges_gained += c;
        for &w in &aset[..i] {
            if g.has_edge(v, w) {
                edges_gained += 1;
            }
        }
    }
    let delta_e = edges_gained - edges_lost;
    let delta_size = aset.len() as i64 - rset.len() as i64;
    let leading = match variant {
        LexVariant::K4 => match delta_size.cmp(&0) {
            Ordering::Equal => delta_e.cmp(&0),
            other => other,
        },
        LexVariant::A3 => match delta_size.cmp(&0) {
            Ordering::Equal => 0i64.cmp(&delta_e),
            other => other,
        },
        LexVariant::Kq(_) => (3 * delta_size - delta_e).cmp(&0),
    };
    match leading {
        Ordering::Greater => Prefix::Better,
        Ordering::Equal => Prefix::Tie,
        Ordering::Less => Prefix::Worse,
    }
}

fn evaluate_candidate(
    g: &Graph,
    variant: &LexVariant,
    s: &VertexSet,
    obj_cur: &[i64],
    rset: &[usize],
    aset: &[usize],
) -> Option<VertexSet> {
    let prefix = prefix_delta(g, variant, s, rset, aset);
    if matches!(prefix, Prefix::Worse) {
        return None;
    }
    let mut sp = s.clone();
    for &x in rset {
        sp.remove(x);
    }
    for &v in aset {
        sp.insert(v);
    }
    if !variant.feasible(g, &sp) {
        return None;
    }
    if matches!(prefix, Prefix::Tie) && variant.objective(g, &sp).as_slice() <= obj_cur {
        return None;
    }
    Some(sp)
}

type FoundMove = (Vec<usize>, Vec<usize>, VertexSet);

fn find_improving(
    g: &Graph,
    variant: &LexVariant,
    s: &VertexSet,
    obj_cur: &[i64],
    removes_pool: &[usize],
    adds_pool: &[usize],
) -> Option<FoundMove> {
    for &(r, a) in variant.shapes() {
        let mut found: Option<FoundMove> = None;
        each_combo(removes_pool, r, &mut |rset| {
            let mut hit = false;
            each_combo(adds_pool, a, &mut |aset| {
                if let Some(sp) = evaluate_candidate(g, variant, s, obj_cur, rset, aset) {
                    found = Some((rset.to_vec(), aset.to_vec(), sp));
                    hit = true;
                }
                hit
            });
            hit
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Runs the exchange search to a local optimum (or until limits strike).
pub fn search(
    g: &Graph,
    variant: &LexVariant,
    seed: Option<&VertexSet>,
    opts: &SearchOptions,
) -> Result<SearchState, SearchError> {
    variant.check_applicable(g)?;
    let s0 = seed.cloned().unwrap_or_else(|| VertexSet::new(g.n()));
    let mut state = SearchState::from_set(g, variant, s0)?;
    let start = std::time::Instant::now();
    let mut rng = opts.order_seed.map(ChaCha8Rng::seed_from_u64);
    loop {
        let (mut adds, mut removes) = build_pools(g, &state.s, opts.full_radius);
        if let Some(rng) = rng.as_mut() {
            adds.shuffle(rng);
            removes.shuffle(rng);
        }
        let found = find_improving(
            g,
            variant,
            &state.s,
            &state.objective_vector,
            &removes,
            &adds,
        );
        let (rv, av, sp) = match found {
            None => {
                state.converged = true;
                return Ok(state);
            }
            Some(f) => f,
        };
        let over_moves = state.move_log.len() as u64 >= opts.limits.max_moves;
        let over_time = opts
            .limits
            .max_millis
            .is_some_and(|ms| start.elapsed().as_millis() as u64 > ms);
        if over_moves || over_time {
            return Err(SearchError::Incomplete(Box::new(state)));
        }
        let previous = state.objective_vector.clone();
        state.s = sp;
        state.refresh(g, variant);
        assert!(
            state.objective_vector > previous,
            "accepted move failed to raise the objective"
        );
        state.move_log.push(Move {
            remove: VertexSet::from_members(g.n(), rv),
            add: VertexSet::from_members(g.n(), av),
        });
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertCheck {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub variant_id: String,
    pub checks: Vec<CertCheck>,
    pub all_passed: bool,
}

impl CertificateReport {
    pub fn check(&self, name: &str) -> Option<&CertCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&CertCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Cert {
    checks: Vec<CertCheck>,
}

impl Cert {
    fn push(&mut self, name: &str, failure: Option<String>) {
        self.checks.push(CertCheck {
            name: name.to_string(),
            passed: failure.is_none(),
            detail: failure,
        });
    }
}

fn isolated_in(g: &Graph, s: &VertexSet) -> VertexSet {
    VertexSet::from_members(g.n(), s.iter().filter(|&v| g.degree_within(s, v) == 0))
}

/// The other S-neighbor of a two-neighbor outside vertex.
fn second_neighbor(g: &Graph, s: &VertexSet, v: usize, first: usize) -> usize {
    g.neighbors(v)
        .intersection(s)
        .iter()
        .find(|&x| x != first)
        .expect("vertex has two neighbors in S")
}

/// Evaluates every structural fact local optimality forces for this
/// variant, as concrete predicates over the actual state. Failures are
/// returned as data, with witnesses; a failing check on a converged state
/// means an improving exchange was missed.
pub fn certify(g: &Graph, state: &SearchState, variant: &LexVariant) -> CertificateReport {
    let s = &state.s;
    let beta = g.beta_counts(s).expect("host ok");
    let mut cert = Cert { checks: Vec::new() };

    cert.push(
        "no_outside_vertex_with_zero_neighbors_in_s",
        beta.witnesses(0).and_then(VertexSet::first).map(|v| {
            format!("vertex {v} has no neighbor in S and could simply be added")
        }),
    );
    cert.push(
        "no_outside_vertex_with_one_neighbor_in_s",
        beta.witnesses(1).and_then(VertexSet::first).map(|v| {
            format!("vertex {v} has exactly one neighbor in S")
        }),
    );

    match variant {
        LexVariant::K4 => certify_k4(g, state, &beta, &mut cert),
        LexVariant::Kq(q) => certify_kq(g, state, &beta, *q, &mut cert),
        LexVariant::A3 => certify_a3(g, state, &beta, &mut cert),
    }

    let all_passed = cert.checks.iter().all(|c| c.passed);
    CertificateReport {
        variant_id: variant.id(),
        checks: cert.checks,
        all_passed,
    }
}

fn certify_k4(g: &Graph, state: &SearchState, beta: &BetaCounts, cert: &mut Cert) {
    let s = &state.s;
    let b2 = beta.witnesses_or_empty(2);
    let b3 = beta.witnesses_or_empty(3);
    let s0 = isolated_in(g, s);
    let trees = g.tree_decomposition(s).expect("state induces a forest");

    cert.push(
        "b2_avoids_isolated_vertices",
        b2.iter()
            .find(|&v| g.neighbors(v).intersects(&s0))
            .map(|v| format!("outside vertex {v} sees an isolated member of S")),
    );
    cert.push(
        "each_s_vertex_has_at_most_two_b2_neighbors",
        s.iter()
            .find(|&x| g.neighbors(x).intersection_count(&b2) > 2)
            .map(|x| format!("S vertex {x} has three or more two-neighbor outsiders")),
    );

    let b2_adjacent = |t: &TreeStats| {
        b2.iter()
            .filter(|&v| g.neighbors(v).intersects(&t.vertices))
            .count()
    };
    cert.push(
        "tree_b2_neighborhood_at_most_tree_size",
        trees
            .iter()
            .find(|t| b2_adjacent(t) > t.vertices.len())
            .map(|t| format!("tree {} exceeds its b2 allowance", t.vertices)),
    );
    cert.push(
        "small_tree_b2_neighborhood_below_tree_size",
        trees
            .iter()
            .find(|t| (2..=7).contains(&t.vertices.len()) && b2_adjacent(t) >= t.vertices.len())
            .map(|t| format!("tree {} has as many adjacent b2 vertices as members", t.vertices)),
    );

    let mut obs5_failure = None;
    let mut obs6_failure = None;
    for v in b3.iter() {
        let ns = g.neighbors(v).intersection(s);
        let isolated = ns.intersection(&s0);
        if isolated.len() > 1 {
            obs6_failure.get_or_insert(format!("vertex {v} sees two isolated members of S"));
        }
        for x in isolated.iter() {
            for y in ns.iter().filter(|&y| y != x) {
                if g.degree_within(s, y) < 2 {
                    obs5_failure.get_or_insert(format!(
                        "vertex {v} sees isolated {x} while co-neighbor {y} has degree under 2"
                    ));
                }
            }
        }
    }
    cert.push("b3_partner_of_isolated_has_busy_second_neighbors", obs5_failure);
    cert.push("b3_sees_at_most_one_isolated_vertex", obs6_failure);

    cert.push(
        "edge_has_at_most_one_common_b2_neighbor",
        g.edges()
            .into_iter()
            .filter(|&(u, v)| s.contains(u) && s.contains(v))
            .find(|&(u, v)| {
                b2.iter()
                    .filter(|&w| g.has_edge(w, u) && g.has_edge(w, v))
                    .count()
                    > 1
            })
            .map(|(u, v)| format!("edge ({u},{v}) inside S has two common b2 neighbors")),
    );

    let mut claim2_failure = None;
    let mut claim3_failure = None;
    let mut claim4_failure = None;
    for x in s.iter() {
        let partners: Vec<usize> = b2.iter().filter(|&v| g.has_edge(v, x)).collect();
        if partners.len() >= 2 {
            let mut rest = s.clone();
            rest.remove(x);
            let comps = g.components_within(&rest);
            for (i, &v1) in partners.iter().enumerate() {
                let s1 = second_neighbor(g, s, v1, x);
                for &v2 in &partners[i + 1..] {
                    let s2 = second_neighbor(g, s, v2, x);
                    if s1 != s2 {
                        let same = comps
                            .iter()
                            .any(|c| c.contains(s1) && c.contains(s2));
                        if !same {
                            claim2_failure.get_or_insert(format!(
                                "removing {x} separates the partner endpoints {s1} and {s2}"
                            ));
                        }
                    }
                    if g.has_edge(x, s1) && g.has_edge(x, s2) {
                        claim3_failure.get_or_insert(format!(
                            "S vertex {x} is adjacent to both partner endpoints {s1} and {s2}"
                        ));
                    }
                }
            }
        }
        // Leaves hanging off a degree-2 vertex: their b2 partners must end
        // on leaves as well (or come back to the same inner vertex).
        if g.degree_within(s, x) == 1 {
            let x1 = g
                .neighbors(x)
                .intersection(s)
                .first()
                .expect("degree-1 vertex has a neighbor");
            if g.degree_within(s, x1) == 2 {
                for &v in &partners {
                    let s2 = second_neighbor(g, s, v, x);
                    if s2 != x1 && g.degree_within(s, s2) > 1 {
                        claim4_failure.get_or_insert(format!(
                            "partner {v} of leaf {x} lands on busy vertex {s2}"
                        ));
                    }
                }
            }
        }
    }
    cert.push("b2_partners_agree_on_component_after_pivot_removal", claim2_failure);
    cert.push("no_s_vertex_adjacent_to_both_partner_endpoints", claim3_failure);
    cert.push("leaf_b2_partners_end_on_leaves", claim4_failure);
}

struct PathInfo {
    len: usize,
    endpoints: VertexSet,
}

fn paths_within(g: &Graph, s: &VertexSet) -> Vec<PathInfo> {
    g.components_within(s)
        .into_iter()
        .map(|comp| {
            let endpoints = VertexSet::from_members(
                g.n(),
                comp.iter().filter(|&v| g.degree_within(&comp, v) <= 1),
            );
            PathInfo {
                len: comp.len() - 1,
                endpoints,
            }
        })
        .collect()
}

fn certify_kq(g: &Graph, state: &SearchState, beta: &BetaCounts, q: usize, cert: &mut Cert) {
    let s = &state.s;
    let b2 = beta.witnesses_or_empty(2);
    let paths = paths_within(g, s);

    cert.push(
        "b2_neighbors_in_s_are_path_endpoints",
        b2.iter()
            .find_map(|v| {
                g.neighbors(v)
                    .intersection(s)
                    .iter()
                    .find(|&x| g.degree_within(s, x) > 1)
                    .map(|x| format!("outside vertex {v} sees interior vertex {x}"))
            }),
    );
    cert.push(
        "endpoint_sees_at_most_q_minus_two_b2",
        s.iter()
            .find(|&x| {
                g.degree_within(s, x) == 1 && g.neighbors(x).intersection_count(&b2) > q - 2
            })
            .map(|x| format!("path endpoint {x} has more than {} b2 neighbors", q - 2)),
    );

    let long_endpoints = paths
        .iter()
        .filter(|p| p.len >= 3)
        .fold(VertexSet::new(g.n()), |mut acc, p| {
            acc.union_with(&p.endpoints);
            acc
        });
    cert.push(
        "every_b2_vertex_reaches_long_path_or_spans_short_one",
        b2.iter()
            .find(|&v| {
                let nv = g.neighbors(v);
                let reaches_long = nv.intersects(&long_endpoints);
                let spans_short = paths
                    .iter()
                    .any(|p| (1..=2).contains(&p.len) && p.endpoints.is_subset_of(nv));
                !(reaches_long || spans_short)
            })
            .map(|v| format!("outside vertex {v} is stranded between paths")),
    );
    cert.push(
        "edge_path_spanned_by_at_most_q_minus_three_b2",
        paths
            .iter()
            .filter(|p| p.len == 1)
            .find(|p| {
                b2.iter()
                    .filter(|&v| p.endpoints.is_subset_of(g.neighbors(v)))
                    .count()
                    > q - 3
            })
            .map(|p| format!("single edge {} has too many spanning b2 vertices", p.endpoints)),
    );
}

fn certify_a3(g: &Graph, state: &SearchState, _beta: &BetaCounts, cert: &mut Cert) {
    let s = &state.s;
    let s0 = isolated_in(g, s);
    cert.push(
        "isolated_neighbors_have_three_s_contacts",
        (0..g.n())
            .find(|&v| {
                !s.contains(v)
                    && g.neighbors(v).intersects(&s0)
                    && g.degree_within(s, v) < 3
            })
            .map(|v| format!("outside vertex {v} touches an isolated S vertex but sees under 3")),
    );
}

#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub variant_id: String,
    #[serde(serialize_with = "crate::ratio::serialize_rat")]
    pub floor: Rat,
    pub floor_ceil: i64,
    pub size: usize,
    pub meets_floor: bool,
    pub detail: String,
}

/// Re-runs the double-counting argument on the converged state and, when
/// it closes, returns the rational floor on |S| it implies. The chain can
/// legitimately fail on irregular inputs (the K4 and A3 arguments need
/// every vertex to carry full degree); that comes back as `ChainFailed`.
pub fn counting_bound(
    g: &Graph,
    state: &SearchState,
    variant: &LexVariant,
) -> Result<CountingReport, SearchError> {
    if !state.converged {
        return Err(SearchError::NotCertified(
            "state has not converged; run the search to a local optimum first".into(),
        ));
    }
    let beta = g.beta_counts(&state.s).expect("host ok");
    let n = g.n() as i64;
    let size = state.s.len();
    let delta = g.max_degree() as i64;
    let (floor, detail) = match variant {
        LexVariant::K4 => {
            let trees = g.tree_decomposition(&state.s).expect("forest");
            let edge_surplus: i64 = trees.iter().map(|t| 2 * t.edge_count as i64).sum::<i64>()
                - beta.count(2) as i64
                + beta.count_at_least(4) as i64;
            if rat_int(edge_surplus) < rat(size as i64, 2) {
                return Err(SearchError::ChainFailed(format!(
                    "tree edge surplus {edge_surplus} is below half the set size ({size}/2)"
                )));
            }
            (
                rat(6 * n, 2 * delta + 5),
                format!("edge surplus {edge_surplus} covers {size}/2"),
            )
        }
        LexVariant::Kq(q) => {
            let qi = *q as i64;
            redistribute_path_potential(g, &state.s, &beta, *q)?;
            (
                rat(6 * n, 2 * delta + qi + 1),
                "every two-neighbor outsider received one unit of path potential".to_string(),
            )
        }
        LexVariant::A3 => {
            let s0 = isolated_in(g, &state.s).len();
            let high = beta.count_at_least(3);
            if high < s0 {
                return Err(SearchError::ChainFailed(format!(
                    "only {high} outsiders with 3+ neighbors against {s0} isolated members"
                )));
            }
            (
                rat(2 * n, delta + 1),
                format!("{high} high-degree outsiders cover {s0} isolated members"),
            )
        }
    };
    let floor_ceil = ceil_i64(&floor);
    Ok(CountingReport {
        variant_id: variant.id(),
        floor,
        floor_ceil,
        size,
        meets_floor: size as i64 >= floor_ceil,
        detail,
    })
}

/// Each path of length l carries potential 2l + (l+1)(q-5)/2. Paths of
/// length >= 3 feed the outsiders adjacent to their endpoints; shorter
/// paths feed the outsiders adjacent to both their endpoints. The caps
/// checked here guarantee one unit per claimant, and coverage guarantees
/// every two-neighbor outsider claims somewhere.
fn redistribute_path_potential(
    g: &Graph,
    s: &VertexSet,
    beta: &BetaCounts,
    q: usize,
) -> Result<(), SearchError> {
    let b2 = beta.witnesses_or_empty(2);
    let paths = paths_within(g, s);
    let long_endpoints = paths
        .iter()
        .filter(|p| p.len >= 3)
        .fold(VertexSet::new(g.n()), |mut acc, p| {
            acc.union_with(&p.endpoints);
            acc
        });
    for v in b2.iter() {
        let nv = g.neighbors(v);
        let covered = nv.intersects(&long_endpoints)
            || paths
                .iter()
                .any(|p| (1..=2).contains(&p.len) && p.endpoints.is_subset_of(nv));
        if !covered {
            return Err(SearchError::ChainFailed(format!(
                "outside vertex {v} cannot claim potential from any path"
            )));
        }
    }
    for p in &paths {
        let claimants = match p.len {
            0 => 0,
            1 | 2 => b2
                .iter()
                .filter(|&v| p.endpoints.is_subset_of(g.neighbors(v)))
                .count(),
            _ => b2
                .iter()
                .filter(|&v| g.neighbors(v).intersects(&p.endpoints))
                .count(),
        };
        let cap = match p.len {
            0 => 0,
            1 => q - 3,
            2 => q - 2,
            _ => 2 * (q - 2),
        };
        if claimants > cap {
            return Err(SearchError::ChainFailed(format!(
                "path {} of length {} has {claimants} claimants over its cap {cap}",
                p.endpoints, p.len
            )));
        }
        let potential =
            rat_int(2 * p.len as i64) + rat_usize(p.len + 1) * rat(q as i64 - 5, 2);
        debug_assert!(
            rat_usize(claimants) <= potential || p.len == 0,
            "claimant cap exceeded the available potential"
        );
    }
    Ok(())
}
