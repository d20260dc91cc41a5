//! Constructive lower bound for induced forests in triangle-free graphs.
//!
//! The builder keeps every vertex of degree at most one, and otherwise
//! deletes a small neighborhood of a carefully chosen max-degree pivot so
//! that the total vertex potential (sum of min(1, 3/(d+2)) over surviving
//! vertices) never decreases. Once the maximum degree falls to 4 the
//! remainder is handed to a base solver whose output is large enough to
//! dominate the surviving potential. The result is an induced forest of
//! size at least ceil of the original potential sum.
//!
//! Every step is recorded in a trace that an independent replay can verify
//! against the input graph, recomputing all degree data from scratch.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bitset::VertexSet;
use crate::bounds::{potential, potential_sum, PotentialKind, Target};
use crate::exact::{self, ExactError};
use crate::graph::Graph;
use crate::ratio::{ceil_i64, rat, rat_int, rat_usize, serialize_rat, Rat};
use crate::search::{search, LexVariant, SearchError};

/// What a single construction step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Kept a vertex of degree at most one and removed it from the
    /// working graph.
    LeafStrip,
    /// Pivot had no max-degree neighbor; deleted the pivot itself.
    Case1,
    /// Every pivot neighbor had max degree; deleted all but one of them.
    Case2,
    /// Some but not all pivot neighbors had max degree; deleted exactly
    /// those.
    Case3,
    /// Maximum degree was at most 4; solved the remainder directly.
    Base,
}

/// One step of the construction, with enough data to re-verify the
/// potential accounting on the original graph.
#[derive(Debug, Clone, Serialize)]
pub struct TfStepTrace {
    pub step_kind: StepKind,
    /// The acting vertex: the stripped vertex, or the pivot of a case
    /// step. Absent for the base step.
    pub pivot: Option<usize>,
    /// Number of max-degree neighbors of the pivot (case steps only).
    pub t: Option<usize>,
    /// Vertices removed from the working graph by this step.
    pub deleted: VertexSet,
    /// Surviving neighbors of the acting vertex.
    pub shell1: VertexSet,
    /// Surviving vertices at distance exactly two from the pivot.
    pub shell2: VertexSet,
    /// For cases 2 and 3: how many deleted vertices each distance-two
    /// vertex was adjacent to.
    pub ni_map: BTreeMap<usize, usize>,
    #[serde(serialize_with = "serialize_rat")]
    pub potential_before: Rat,
    #[serde(serialize_with = "serialize_rat")]
    pub potential_after: Rat,
    /// The forest found by the base solver (base step only).
    pub kept: Option<VertexSet>,
}

/// The forest produced by the construction, together with the bound it
/// was required to meet.
#[derive(Debug, Clone, Serialize)]
pub struct ForestCertificate {
    pub forest: VertexSet,
    pub size: usize,
    #[serde(serialize_with = "serialize_rat")]
    pub potential: Rat,
    pub bound_ceil: i64,
    pub meets_bound: bool,
}

/// Controls how the ultimate low-degree remainder is solved, plus the
/// pivot tie-break.
#[derive(Debug, Clone)]
pub struct BaseSolverConfig {
    /// Components up to this size go straight to the exact solver.
    pub exact_cap: usize,
    /// Node budget for exact solves, both under the cap and as a last
    /// resort for larger components.
    pub exact_budget: u64,
    /// Options for the exchange-search fallback on larger components.
    pub search: crate::search::SearchOptions,
    /// Seeded pivot tie-breaking; None always picks the lowest index.
    pub tie_seed: Option<u64>,
}

impl Default for BaseSolverConfig {
    fn default() -> Self {
        BaseSolverConfig {
            exact_cap: 24,
            exact_budget: 5_000_000,
            search: crate::search::SearchOptions::default(),
            tie_seed: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum TfError {
    #[error("the construction needs a triangle-free graph")]
    NotApplicable,
    #[error(
        "base solver fell short on a component with {comp_n} vertices and \
         {comp_m} edges: found {found}, needed {needed}"
    )]
    BaseCaseShortfall {
        comp_n: usize,
        comp_m: usize,
        found: usize,
        needed: i64,
    },
    #[error("trace invalid at step {index}: {reason}")]
    TraceInvalid { index: usize, reason: String },
}

/// Sum of triangle-free potentials over `alive`, with degrees measured
/// inside `alive`.
pub fn potential_within(g: &Graph, alive: &VertexSet) -> Rat {
    alive
        .iter()
        .map(|v| {
            potential(
                PotentialKind::TriangleFree,
                g.degree_within(alive, v),
            )
        })
        .fold(rat_int(0), |a, b| a + b)
}

fn max_degree_within(g: &Graph, alive: &VertexSet) -> usize {
    alive
        .iter()
        .map(|v| g.degree_within(alive, v))
        .max()
        .unwrap_or(0)
}

fn min_degree_within(g: &Graph, alive: &VertexSet) -> usize {
    alive
        .iter()
        .map(|v| g.degree_within(alive, v))
        .min()
        .unwrap_or(0)
}

/// Surviving vertices at distance exactly two from `pivot`.
fn second_shell(g: &Graph, alive: &VertexSet, pivot: usize, shell1: &VertexSet) -> VertexSet {
    let mut s2 = VertexSet::new(g.n());
    for u in shell1.iter() {
        s2.union_with(g.neighbors(u));
    }
    s2.intersect_with(alive);
    s2.subtract(shell1);
    s2.remove(pivot);
    s2
}

/// Picks a max-degree vertex with the most max-degree neighbors. Ties go
/// to the lowest index, or to a seeded draw when `rng` is supplied.
fn pick_pivot(
    g: &Graph,
    alive: &VertexSet,
    dmax: usize,
    rng: Option<&mut ChaCha8Rng>,
) -> (usize, usize) {
    let mut ties: Vec<usize> = Vec::new();
    let mut best_t = 0usize;
    for v in alive.iter() {
        if g.degree_within(alive, v) != dmax {
            continue;
        }
        let tv = g
            .neighbors(v)
            .intersection(alive)
            .iter()
            .filter(|&u| g.degree_within(alive, u) == dmax)
            .count();
        if ties.is_empty() || tv > best_t {
            best_t = tv;
            ties.clear();
            ties.push(v);
        } else if tv == best_t {
            ties.push(v);
        }
    }
    let v = match rng {
        Some(r) => ties[r.gen_range(0..ties.len())],
        None => ties[0],
    };
    (v, best_t)
}

/// Builds an induced forest of size at least ceil of the triangle-free
/// potential sum, returning it with a step-by-step trace that
/// [`replay_trace`] can verify independently.
pub fn construct_triangle_free_forest(
    g: &Graph,
    cfg: &BaseSolverConfig,
) -> Result<(ForestCertificate, Vec<TfStepTrace>), TfError> {
    if !g.is_triangle_free() {
        return Err(TfError::NotApplicable);
    }
    let n = g.n();
    let mut alive = VertexSet::full(n);
    let mut forest = VertexSet::new(n);
    let mut traces = Vec::new();
    let mut rng = cfg.tie_seed.map(ChaCha8Rng::seed_from_u64);

    loop {
        let before = potential_within(g, &alive);

        // A vertex with at most one surviving neighbor can always join the
        // forest: re-adding it attaches at most one edge to whatever the
        // deeper recursion keeps, so no cycle can close through it. Its
        // own potential is 1, so removing it costs at most one unit, which
        // the kept vertex repays.
        let strippable = alive.iter().find(|&v| g.degree_within(&alive, v) <= 1);
        if let Some(v) = strippable {
            let mut deleted = VertexSet::new(n);
            deleted.insert(v);
            let shell1 = g.neighbors(v).intersection(&alive);
            alive.remove(v);
            forest.insert(v);
            traces.push(TfStepTrace {
                step_kind: StepKind::LeafStrip,
                pivot: Some(v),
                t: None,
                deleted,
                shell1,
                shell2: VertexSet::new(n),
                ni_map: BTreeMap::new(),
                potential_before: before,
                potential_after: potential_within(g, &alive),
                kept: None,
            });
            continue;
        }

        let dmax = max_degree_within(g, &alive);
        if dmax <= 4 {
            let kept = solve_base(g, &alive, cfg)?;
            forest.union_with(&kept);
            traces.push(TfStepTrace {
                step_kind: StepKind::Base,
                pivot: None,
                t: None,
                deleted: VertexSet::new(n),
                shell1: VertexSet::new(n),
                shell2: VertexSet::new(n),
                ni_map: BTreeMap::new(),
                potential_before: before.clone(),
                potential_after: before,
                kept: Some(kept),
            });
            break;
        }

        // Max degree at least 5 and min degree at least 2. Delete around
        // the pivot; each case removes enough high-degree vertices that
        // the degree drops among the survivors repay the lost potential.
        let (pivot, t) = pick_pivot(g, &alive, dmax, rng.as_mut());
        let shell1 = g.neighbors(pivot).intersection(&alive);
        let shell2 = second_shell(g, &alive, pivot, &shell1);
        let mut tset = VertexSet::new(n);
        for u in shell1.iter() {
            if g.degree_within(&alive, u) == dmax {
                tset.insert(u);
            }
        }
        debug_assert_eq!(tset.len(), t);

        let (kind, deleted) = if t == 0 {
            let mut d = VertexSet::new(n);
            d.insert(pivot);
            (StepKind::Case1, d)
        } else if t == dmax {
            // Keep one max-degree neighbor so the pivot survives with
            // degree 1 and contributes a full potential unit.
            let mut d = VertexSet::new(n);
            for u in tset.iter().take(dmax - 1) {
                d.insert(u);
            }
            (StepKind::Case2, d)
        } else {
            (StepKind::Case3, tset)
        };

        let ni_map: BTreeMap<usize, usize> = match kind {
            StepKind::Case2 | StepKind::Case3 => shell2
                .iter()
                .map(|i| (i, g.neighbors(i).intersection_count(&deleted)))
                .collect(),
            _ => BTreeMap::new(),
        };

        alive.subtract(&deleted);
        let after = potential_within(g, &alive);
        debug_assert!(after >= before, "potential dropped across a pivot case");
        traces.push(TfStepTrace {
            step_kind: kind,
            pivot: Some(pivot),
            t: Some(t),
            deleted,
            shell1,
            shell2,
            ni_map,
            potential_before: before,
            potential_after: after,
            kept: None,
        });
    }

    let total = potential_sum(g, PotentialKind::TriangleFree);
    let bound_ceil = ceil_i64(&total);
    // The per-step accounting guarantees both of these; a failure here is
    // a bug in the builder, not a property of the input.
    assert!(
        g.induces_forest(&forest).expect("forest lives on g"),
        "construction produced a non-forest"
    );
    assert!(
        forest.len() as i64 >= bound_ceil,
        "construction missed its own potential bound"
    );
    let size = forest.len();
    Ok((
        ForestCertificate {
            forest,
            size,
            potential: total,
            bound_ceil,
            meets_bound: true,
        },
        traces,
    ))
}

/// Solves the low-degree remainder component by component: exact search
/// under the size cap, exchange search above it, and a budgeted exact run
/// as a last resort. Each component must reach its edge-count floor
/// (vertices minus a quarter of the edges) or the whole construction
/// reports a shortfall.
fn solve_base(g: &Graph, alive: &VertexSet, cfg: &BaseSolverConfig) -> Result<VertexSet, TfError> {
    let mut kept = VertexSet::new(g.n());
    for comp in g.components_within(alive) {
        let (sub, members) = g.induced_subgraph(&comp);
        let nc = sub.n();
        let mc = sub.m();
        let needed = ceil_i64(&(rat_usize(nc) - rat_usize(mc) / rat_int(4)));

        let mut best: Option<VertexSet> = None;
        if nc <= cfg.exact_cap {
            match exact::solve(&sub, Target::Forest, Some(cfg.exact_budget)) {
                Ok(r) => best = Some(r.witness),
                Err(ExactError::Incomplete(partial)) => best = Some(partial.witness),
                Err(ExactError::TooLarge { .. }) => {}
            }
        }

        let have = best.as_ref().map_or(0, VertexSet::len);
        if (have as i64) < needed {
            // Exchange search, seeded with whatever the exact run managed.
            let found = match search(&sub, &LexVariant::K4, best.as_ref(), &cfg.search) {
                Ok(state) => Some(state.s),
                Err(SearchError::Incomplete(state)) => Some(state.s),
                Err(_) => None,
            };
            if let Some(s) = found {
                if s.len() > have {
                    best = Some(s);
                }
            }
        }

        let have = best.as_ref().map_or(0, VertexSet::len);
        if (have as i64) < needed && nc > cfg.exact_cap && nc <= exact::MAX_N {
            match exact::solve(&sub, Target::Forest, Some(cfg.exact_budget)) {
                Ok(r) if r.optimum > have => best = Some(r.witness),
                Err(ExactError::Incomplete(partial)) if partial.optimum > have => {
                    best = Some(partial.witness)
                }
                _ => {}
            }
        }

        let best = best.unwrap_or_else(|| VertexSet::new(nc));
        if (best.len() as i64) < needed {
            return Err(TfError::BaseCaseShortfall {
                comp_n: nc,
                comp_m: mc,
                found: best.len(),
                needed,
            });
        }
        for i in best.iter() {
            kept.insert(members[i]);
        }
    }
    Ok(kept)
}

/// Summary of a successful trace replay.
#[derive(Debug, Clone, Serialize)]
pub struct ReplayReport {
    pub steps: usize,
    pub forest: VertexSet,
    pub size: usize,
    #[serde(serialize_with = "serialize_rat")]
    pub potential: Rat,
    pub bound_ceil: i64,
}

fn invalid(index: usize, reason: impl Into<String>) -> TfError {
    TfError::TraceInvalid {
        index,
        reason: reason.into(),
    }
}

/// Re-runs a construction trace against the original graph, recomputing
/// every degree, shell, and potential from scratch and checking the
/// claimed accounting step by step. Returns the rebuilt forest and bound
/// on success; the first discrepancy aborts with the offending step index.
pub fn replay_trace(g: &Graph, trace: &[TfStepTrace]) -> Result<ReplayReport, TfError> {
    if trace.is_empty() {
        return Err(invalid(0, "empty trace"));
    }
    let n = g.n();
    let f = |d: usize| potential(PotentialKind::TriangleFree, d);
    let mut alive = VertexSet::full(n);
    let mut forest = VertexSet::new(n);

    for (i, step) in trace.iter().enumerate() {
        let before = potential_within(g, &alive);
        if before != step.potential_before {
            return Err(invalid(i, "recorded potential before step is wrong"));
        }
        let is_last = i == trace.len() - 1;
        if (step.step_kind == StepKind::Base) != is_last {
            return Err(invalid(
                i,
                "a trace must end with exactly one base step",
            ));
        }
        if step.step_kind != StepKind::Base && step.kept.is_some() {
            return Err(invalid(i, "only the base step may keep a solved forest"));
        }

        match step.step_kind {
            StepKind::LeafStrip => {
                let v = step.pivot.ok_or_else(|| invalid(i, "strip step without a vertex"))?;
                if !alive.contains(v) {
                    return Err(invalid(i, format!("vertex {v} was already removed")));
                }
                if step.deleted.to_vec() != vec![v] {
                    return Err(invalid(i, "strip must delete exactly its own vertex"));
                }
                let d = g.degree_within(&alive, v);
                if d > 1 {
                    return Err(invalid(
                        i,
                        format!("stripped vertex {v} still had {d} neighbors"),
                    ));
                }
                if step.shell1 != g.neighbors(v).intersection(&alive) {
                    return Err(invalid(i, "recorded neighborhood is wrong"));
                }
                if !step.shell2.is_empty() || !step.ni_map.is_empty() {
                    return Err(invalid(i, "strip steps carry no second shell"));
                }
                alive.remove(v);
                forest.insert(v);
                let after = potential_within(g, &alive);
                if after != step.potential_after {
                    return Err(invalid(i, "recorded potential after step is wrong"));
                }
                // The kept vertex repays at most one unit of potential.
                if after < before - rat_int(1) {
                    return Err(invalid(i, "strip lost more than one unit of potential"));
                }
            }

            StepKind::Case1 | StepKind::Case2 | StepKind::Case3 => {
                let v1 = step.pivot.ok_or_else(|| invalid(i, "case step without a pivot"))?;
                if !alive.contains(v1) {
                    return Err(invalid(i, format!("pivot {v1} was already removed")));
                }
                let dmax = max_degree_within(g, &alive);
                if dmax < 5 {
                    return Err(invalid(
                        i,
                        format!("case step entered at max degree {dmax}, needs at least 5"),
                    ));
                }
                if min_degree_within(g, &alive) < 2 {
                    return Err(invalid(
                        i,
                        "case step entered while a strippable vertex remained",
                    ));
                }
                if g.degree_within(&alive, v1) != dmax {
                    return Err(invalid(i, "pivot does not have maximum degree"));
                }
                let shell1 = g.neighbors(v1).intersection(&alive);
                if shell1 != step.shell1 {
                    return Err(invalid(i, "recorded first shell is wrong"));
                }
                let shell2 = second_shell(g, &alive, v1, &shell1);
                if shell2 != step.shell2 {
                    return Err(invalid(i, "recorded second shell is wrong"));
                }
                let mut tset = VertexSet::new(n);
                for u in shell1.iter() {
                    if g.degree_within(&alive, u) == dmax {
                        tset.insert(u);
                    }
                }
                let t = tset.len();
                if step.t != Some(t) {
                    return Err(invalid(
                        i,
                        format!("recorded t disagrees with the graph (actual {t})"),
                    ));
                }
                // The pivot must maximize t among all max-degree vertices;
                // case 3 accounting leans on this below.
                for u in alive.iter() {
                    if g.degree_within(&alive, u) != dmax {
                        continue;
                    }
                    let tu = g
                        .neighbors(u)
                        .intersection(&alive)
                        .iter()
                        .filter(|&w| g.degree_within(&alive, w) == dmax)
                        .count();
                    if tu > t {
                        return Err(invalid(
                            i,
                            format!("vertex {u} has {tu} max-degree neighbors, pivot only {t}"),
                        ));
                    }
                }

                // Work out what the step deletes and the exact potential
                // identity it claims, then verify both.
                let q = match step.step_kind {
                    StepKind::Case1 => {
                        if t != 0 {
                            return Err(invalid(i, "case 1 requires no max-degree neighbor"));
                        }
                        let mut expected = VertexSet::new(n);
                        expected.insert(v1);
                        if step.deleted != expected {
                            return Err(invalid(i, "case 1 must delete exactly the pivot"));
                        }
                        if !step.ni_map.is_empty() {
                            return Err(invalid(i, "case 1 carries no adjacency counts"));
                        }
                        // Only the pivot's neighbors change degree, each
                        // losing exactly the edge to the pivot.
                        let mut q = before.clone() - f(dmax);
                        for u in shell1.iter() {
                            let d = g.degree_within(&alive, u);
                            q += f(d - 1) - f(d);
                        }
                        q
                    }
                    StepKind::Case2 => {
                        if t != dmax {
                            return Err(invalid(
                                i,
                                "case 2 requires every pivot neighbor to have max degree",
                            ));
                        }
                        let mut expected = VertexSet::new(n);
                        for u in tset.iter().take(dmax - 1) {
                            expected.insert(u);
                        }
                        if step.deleted != expected {
                            return Err(invalid(
                                i,
                                "case 2 must delete the lowest-indexed max-degree neighbors, \
                                 keeping one",
                            ));
                        }
                        check_ni(g, i, step, &shell2)?;
                        let total_ni: usize = step.ni_map.values().sum();
                        // Each deleted vertex has max degree and, with no
                        // triangles, all its neighbors besides the pivot sit
                        // in the second shell.
                        if total_ni != (dmax - 1) * (dmax - 1) {
                            return Err(invalid(
                                i,
                                "second-shell adjacency counts do not add up",
                            ));
                        }
                        let unit = f(dmax - 1) - f(dmax);
                        let mut q = before.clone() + (rat_int(1) - f(dmax))
                            - rat_int((dmax - 1) as i64) * f(dmax);
                        for u in shell2.iter() {
                            let d = g.degree_within(&alive, u);
                            let ni = step.ni_map[&u];
                            let gain = f(d - ni) - f(d);
                            // Convexity of the potential, instantiated on
                            // the actual degree data.
                            if gain < rat_usize(ni) * unit.clone() {
                                return Err(invalid(
                                    i,
                                    format!("degree-drop gain at vertex {u} is too small"),
                                ));
                            }
                            q += gain;
                        }
                        let floor = rat(
                            ((dmax - 1) * (dmax - 5)) as i64,
                            ((dmax + 1) * (dmax + 2)) as i64,
                        );
                        if q.clone() - before.clone() < floor {
                            return Err(invalid(i, "case 2 gain falls under its floor"));
                        }
                        q
                    }
                    StepKind::Case3 => {
                        if t == 0 || t == dmax {
                            return Err(invalid(
                                i,
                                "case 3 requires some but not all neighbors at max degree",
                            ));
                        }
                        if step.deleted != tset {
                            return Err(invalid(
                                i,
                                "case 3 must delete exactly the max-degree neighbors",
                            ));
                        }
                        check_ni(g, i, step, &shell2)?;
                        let total_ni: usize = step.ni_map.values().sum();
                        if total_ni != t * (dmax - 1) {
                            return Err(invalid(
                                i,
                                "second-shell adjacency counts do not add up",
                            ));
                        }
                        // A deleted vertex has max degree, so its count of
                        // max-degree neighbors is at most the pivot's t, and
                        // one of those is the pivot itself. Summing over the
                        // t deleted vertices caps the max-degree second
                        // shell at t(t-1).
                        let heavy_ni: usize = shell2
                            .iter()
                            .filter(|&u| g.degree_within(&alive, u) == dmax)
                            .map(|u| step.ni_map[&u])
                            .sum();
                        if heavy_ni > t * (t - 1) {
                            return Err(invalid(
                                i,
                                "max-degree second shell is too entangled with the deleted set",
                            ));
                        }
                        let unit_heavy = f(dmax - 1) - f(dmax);
                        let unit_light = f(dmax - 2) - f(dmax - 1);
                        let mut q = before.clone() + (f(dmax - t) - f(dmax))
                            - rat_usize(t) * f(dmax);
                        for u in shell2.iter() {
                            let d = g.degree_within(&alive, u);
                            let ni = step.ni_map[&u];
                            let gain = f(d - ni) - f(d);
                            let unit = if d == dmax {
                                unit_heavy.clone()
                            } else {
                                unit_light.clone()
                            };
                            if gain < rat_usize(ni) * unit {
                                return Err(invalid(
                                    i,
                                    format!("degree-drop gain at vertex {u} is too small"),
                                ));
                            }
                            q += gain;
                        }
                        let (dm, tt) = (dmax as i64, t as i64);
                        let floor = rat(
                            3 * tt * ((dm - tt).pow(2) + (tt - 2).pow(2) + dm - 4),
                            dm * (dm + 1) * (dm + 2) * (dm - tt + 2),
                        );
                        if q.clone() - before.clone() < floor {
                            return Err(invalid(i, "case 3 gain falls under its floor"));
                        }
                        q
                    }
                    _ => unreachable!(),
                };

                alive.subtract(&step.deleted);
                let after = potential_within(g, &alive);
                if after != step.potential_after {
                    return Err(invalid(i, "recorded potential after step is wrong"));
                }
                if after != q {
                    return Err(invalid(
                        i,
                        "potential identity disagrees with the direct recomputation",
                    ));
                }
                if after < before {
                    return Err(invalid(i, "potential dropped across a case step"));
                }
            }

            StepKind::Base => {
                let kept = step
                    .kept
                    .as_ref()
                    .ok_or_else(|| invalid(i, "base step without a solved forest"))?;
                if step.pivot.is_some() || step.t.is_some() {
                    return Err(invalid(i, "base steps have no pivot"));
                }
                if !step.deleted.is_empty()
                    || !step.shell1.is_empty()
                    || !step.shell2.is_empty()
                    || !step.ni_map.is_empty()
                {
                    return Err(invalid(i, "base steps delete nothing"));
                }
                let dmax = max_degree_within(g, &alive);
                if dmax > 4 {
                    return Err(invalid(
                        i,
                        format!("base step entered at max degree {dmax}"),
                    ));
                }
                if !alive.is_empty() && min_degree_within(g, &alive) < 2 {
                    return Err(invalid(
                        i,
                        "base step entered while a strippable vertex remained",
                    ));
                }
                if !kept.is_subset_of(&alive) {
                    return Err(invalid(i, "base forest uses removed vertices"));
                }
                if !g.induces_forest(kept).map_err(|e| invalid(i, e.to_string()))? {
                    return Err(invalid(i, "base forest is not a forest"));
                }
                // With every degree between 2 and 4, each vertex's share of
                // the floor n - m/4 already dominates its potential, so
                // this check closes the accounting chain.
                let nc = alive.len();
                let mc = g.edge_count_within(&alive);
                if rat_usize(kept.len()) < rat_usize(nc) - rat_usize(mc) / rat_int(4) {
                    return Err(invalid(i, "base forest misses the edge-count floor"));
                }
                if step.potential_after != step.potential_before {
                    return Err(invalid(i, "base steps do not change potential"));
                }
                forest.union_with(kept);
            }
        }
    }

    if !g.induces_forest(&forest).expect("forest lives on g") {
        return Err(invalid(trace.len() - 1, "rebuilt set is not a forest"));
    }
    let total = potential_sum(g, PotentialKind::TriangleFree);
    let bound_ceil = ceil_i64(&total);
    if (forest.len() as i64) < bound_ceil {
        return Err(invalid(
            trace.len() - 1,
            "rebuilt forest misses the potential bound",
        ));
    }
    Ok(ReplayReport {
        steps: trace.len(),
        size: forest.len(),
        forest,
        potential: total,
        bound_ceil,
    })
}

/// Checks that the recorded adjacency counts cover the second shell
/// exactly and match the graph.
fn check_ni(g: &Graph, i: usize, step: &TfStepTrace, shell2: &VertexSet) -> Result<(), TfError> {
    if step.ni_map.len() != shell2.len() {
        return Err(invalid(i, "adjacency counts must cover the second shell"));
    }
    for u in shell2.iter() {
        let Some(&ni) = step.ni_map.get(&u) else {
            return Err(invalid(i, format!("vertex {u} missing from adjacency counts")));
        };
        if ni != g.neighbors(u).intersection_count(&step.deleted) {
            return Err(invalid(i, format!("adjacency count at vertex {u} is wrong")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{catalog, generate, Family, GeneratorSpec};
    use crate::oracle;

    fn run(g: &Graph) -> (ForestCertificate, Vec<TfStepTrace>) {
        construct_triangle_free_forest(g, &BaseSolverConfig::default()).unwrap()
    }

    fn kinds(trace: &[TfStepTrace]) -> Vec<StepKind> {
        trace.iter().map(|s| s.step_kind).collect()
    }

    #[test]
    fn star_is_kept_whole() {
        let g = catalog::star(10);
        let (cert, trace) = run(&g);
        // Potential is 9 + 3/11, so the bound rounds up to the whole star.
        assert_eq!(cert.bound_ceil, 10);
        assert_eq!(cert.size, 10);
        assert_eq!(trace.len(), 11);
        assert!(trace[..10].iter().all(|s| s.step_kind == StepKind::LeafStrip));
        assert_eq!(trace[10].step_kind, StepKind::Base);
        replay_trace(&g, &trace).unwrap();
    }

    #[test]
    fn pentagon_goes_straight_to_base() {
        let g = catalog::cycle(5);
        let (cert, trace) = run(&g);
        assert_eq!(kinds(&trace), vec![StepKind::Base]);
        assert_eq!(cert.bound_ceil, 4);
        assert_eq!(cert.size, 4);
        replay_trace(&g, &trace).unwrap();
    }

    #[test]
    fn petersen_base_is_exact() {
        let g = catalog::petersen();
        let (cert, trace) = run(&g);
        assert_eq!(kinds(&trace), vec![StepKind::Base]);
        assert_eq!(cert.bound_ceil, 6);
        // The exact component solve finds the true optimum, not merely the
        // bound.
        assert_eq!(cert.size, 7);
        replay_trace(&g, &trace).unwrap();
    }

    #[test]
    fn balanced_biclique_deletes_one_side() {
        let g = catalog::complete_bipartite(6, 6);
        let (cert, trace) = run(&g);
        let first = &trace[0];
        assert_eq!(first.step_kind, StepKind::Case2);
        assert_eq!(first.t, Some(6));
        // Five of the pivot's six neighbors go, lowest indices first.
        assert_eq!(first.deleted.to_vec(), vec![6, 7, 8, 9, 10]);
        assert_eq!(
            first.potential_after.clone() - first.potential_before.clone(),
            rat(15, 8)
        );
        // What survives is a star plus leaves, all stripped.
        assert_eq!(cert.size, 7);
        assert_eq!(
            exact::max_induced_forest(&g).unwrap().optimum,
            7,
            "construction should match the optimum here"
        );
        replay_trace(&g, &trace).unwrap();
    }

    #[test]
    fn lopsided_matching_complement_hits_case_three() {
        // Balanced 5x5 biclique minus a perfect matching, plus the edge
        // (0,5) it removed: exactly two vertices of degree 5, adjacent to
        // each other, everything else degree 4.
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    edges.push((i, 5 + j));
                }
            }
        }
        edges.push((0, 5));
        let g = Graph::from_edges(10, &edges).unwrap();
        let (cert, trace) = run(&g);
        let first = &trace[0];
        assert_eq!(first.step_kind, StepKind::Case3);
        assert_eq!(first.pivot, Some(0));
        assert_eq!(first.t, Some(1));
        assert_eq!(first.deleted.to_vec(), vec![5]);
        let gain = first.potential_after.clone() - first.potential_before.clone();
        assert!(gain >= rat(3, 70), "worst-case gain floor at degree 5");
        assert!(cert.size as i64 >= cert.bound_ceil);
        replay_trace(&g, &trace).unwrap();
    }

    #[test]
    fn random_bipartite_and_sparse_graphs_replay_cleanly() {
        let mut specs = Vec::new();
        for seed in 0..12 {
            specs.push(GeneratorSpec {
                family: Family::BipartiteRandom { p: 0.5 },
                n: 14,
                seed,
            });
            specs.push(GeneratorSpec {
                family: Family::TriangleFreeRejection { p: 0.12 },
                n: 14,
                seed: 100 + seed,
            });
        }
        for spec in &specs {
            let g = generate(spec).unwrap().remove(0);
            let (cert, trace) = run(&g);
            let report = replay_trace(&g, &trace).unwrap();
            assert_eq!(report.size, cert.size);
            assert_eq!(report.forest, cert.forest);
            let (opt, _) = oracle::max_forest(&g);
            assert!(
                cert.size <= opt,
                "constructed {} but the optimum is {} on {}",
                cert.size,
                opt,
                spec.label()
            );
        }
    }

    #[test]
    fn pivot_tie_seeds_agree_on_the_bound() {
        let g = generate(&GeneratorSpec {
            family: Family::BipartiteRandom { p: 0.55 },
            n: 16,
            seed: 7,
        })
        .unwrap()
        .remove(0);
        let mut sizes = Vec::new();
        for tie_seed in [None, Some(1), Some(2), Some(3), Some(4), Some(5)] {
            let cfg = BaseSolverConfig {
                tie_seed,
                ..BaseSolverConfig::default()
            };
            let (cert, trace) = construct_triangle_free_forest(&g, &cfg).unwrap();
            assert!(cert.meets_bound);
            replay_trace(&g, &trace).unwrap();
            sizes.push(cert.size);
        }
        // Different pivots may find different forests, but never below the
        // shared bound, which the asserts above already pinned.
        assert!(!sizes.is_empty());
    }

    #[test]
    fn triangles_are_rejected() {
        let g = catalog::complete(3);
        assert!(matches!(
            construct_triangle_free_forest(&g, &BaseSolverConfig::default()),
            Err(TfError::NotApplicable)
        ));
    }

    #[test]
    fn empty_graph_yields_empty_forest() {
        let g = Graph::from_edges(0, &[]).unwrap();
        let (cert, trace) = run(&g);
        assert_eq!(cert.size, 0);
        assert_eq!(cert.bound_ceil, 0);
        assert_eq!(kinds(&trace), vec![StepKind::Base]);
        replay_trace(&g, &trace).unwrap();
    }

    #[test]
    fn corrupted_traces_are_rejected() {
        let g = catalog::complete_bipartite(6, 6);
        let (_, trace) = run(&g);

        let mut bad_t = trace.clone();
        bad_t[0].t = Some(3);
        let err = replay_trace(&g, &bad_t).unwrap_err();
        assert!(matches!(err, TfError::TraceInvalid { index: 0, .. }), "{err}");

        let mut bad_potential = trace.clone();
        bad_potential[0].potential_after = rat_int(99);
        let err = replay_trace(&g, &bad_potential).unwrap_err();
        assert!(matches!(err, TfError::TraceInvalid { index: 0, .. }), "{err}");

        let mut bad_deleted = trace.clone();
        bad_deleted[0].deleted.remove(6);
        let err = replay_trace(&g, &bad_deleted).unwrap_err();
        assert!(matches!(err, TfError::TraceInvalid { index: 0, .. }), "{err}");

        let truncated = &trace[..trace.len() - 1];
        assert!(replay_trace(&g, truncated).is_err());
        assert!(replay_trace(&g, &[]).is_err());
    }

    #[test]
    fn paths_survive_whole() {
        let g = catalog::path(5);
        let (cert, trace) = run(&g);
        // Potential 2 + 3*(3/4) rounds up to all five vertices.
        assert_eq!(cert.bound_ceil, 5);
        assert_eq!(cert.size, 5);
        replay_trace(&g, &trace).unwrap();
    }
}
