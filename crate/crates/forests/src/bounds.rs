//! Closed-form lower bounds and the potential-function toolkit.
//!
//! The central objects are two vertex potentials
//!
//!   f_gen(d) = min(1, 2/(d+1))      and      f_tf(d) = min(1, 3/(d+2)),
//!
//! whose sums over all degrees lower-bound the maximum induced forest of a
//! general and a triangle-free graph respectively. Around them sit a family
//! of degree-only closed forms (average degree, maximum degree, clique
//! number, K4-free and Kq-free variants, and sparse triangle-free special
//! cases), each reported as an exact rational with an applicability flag
//! and the quantity it bounds (a, a3 or a4).
//!
//! The module also exposes exhaustive checkers for the potential-difference
//! inequalities the constructive algorithm leans on; these run over integer
//! ranges in exact arithmetic and return the (expected empty) violation
//! lists instead of asserting, so test code can report them.

use crate::graph::{Graph, GraphStats};
use crate::ratio::{rat, rat_int, rat_usize, Rat};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundsError {
    #[error("bound not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
}

/// Which quantity a bound constrains: the maximum induced forest (a), or
/// the linear variants a3 / a4 where components must be paths of at most
/// 3 / 4 edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Forest,
    LinearK(usize),
}

impl Target {
    pub fn as_str(&self) -> String {
        match self {
            Target::Forest => "a".to_string(),
            Target::LinearK(k) => format!("a{k}"),
        }
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    General,
    TriangleFree,
}

/// The vertex potential f(d).
pub fn potential(kind: PotentialKind, d: usize) -> Rat {
    match kind {
        PotentialKind::General => {
            if d <= 1 {
                rat_int(1)
            } else {
                rat(2, d as i64 + 1)
            }
        }
        PotentialKind::TriangleFree => {
            if d <= 1 {
                rat_int(1)
            } else {
                rat(3, d as i64 + 2)
            }
        }
    }
}

/// Sum of the potential over every vertex degree.
pub fn potential_sum(g: &Graph, kind: PotentialKind) -> Rat {
    (0..g.n())
        .map(|v| potential(kind, g.degree(v)))
        .fold(rat_int(0), |a, b| a + b)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub id: String,
    pub target: Target,
    #[serde(serialize_with = "crate::ratio::serialize_rat")]
    pub value: Rat,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Set on the Kq-free entry with q = omega + 1, the choice the bound is
    /// sharp for.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    #[serde(default)]
    pub tight_q: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub graph_label: String,
    pub n: usize,
    pub m: usize,
    pub stats: GraphStats,
    pub entries: Vec<BoundEntry>,
    /// Best (id, ceil(value)) among applicable entries bounding a itself.
    pub best_applicable: Option<(String, i64)>,
}

impl BoundReport {
    pub fn entry(&self, id: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

fn entry(
    id: &str,
    target: Target,
    value: Rat,
    applicable: bool,
    reason: &str,
) -> BoundEntry {
    BoundEntry {
        id: id.to_string(),
        target,
        value,
        applicable,
        reason: if applicable {
            None
        } else {
            Some(reason.to_string())
        },
        tight_q: false,
    }
}

/// Evaluates the whole catalog of degree-only bounds on one graph.
pub fn closed_form_bounds(g: &Graph, label: &str) -> Result<BoundReport, BoundsError> {
    if g.n() == 0 {
        return Err(BoundsError::NotApplicable("empty graph".into()));
    }
    let stats = g.stats();
    let n = rat_usize(g.n());
    let m = rat_usize(g.m());
    let tf = stats.triangle_free;
    let avg = stats.avg_degree.clone();
    let dmax = stats.delta_max as i64;
    let omega = stats.omega as i64;
    let avg_ge2 = avg >= rat_int(2);
    let avg_le4 = avg <= rat_int(4);

    let mut entries = Vec::new();

    entries.push(entry(
        "potential_general",
        Target::Forest,
        potential_sum(g, PotentialKind::General),
        true,
        "",
    ));
    entries.push(entry(
        "potential_triangle_free",
        Target::Forest,
        potential_sum(g, PotentialKind::TriangleFree),
        tf,
        "requires a triangle-free graph",
    ));
    entries.push(entry(
        "amt_n_minus_m4",
        Target::Forest,
        n.clone() - m.clone() / rat_int(4),
        tf,
        "requires a triangle-free graph",
    ));
    let shi_xu: Rat = g
        .components_within(&crate::bitset::VertexSet::full(g.n()))
        .iter()
        .map(|comp| {
            let nc = rat_usize(comp.len());
            let mc = rat_usize(g.edge_count_within(comp));
            (rat_int(20) * nc - rat_int(5) * mc - rat_int(5)) / rat_int(19)
        })
        .fold(rat_int(0), |a, b| a + b);
    entries.push(entry(
        "shi_xu_component_sum",
        Target::Forest,
        shi_xu,
        tf,
        "requires a triangle-free graph",
    ));
    entries.push(entry(
        "tf_avg_degree",
        Target::Forest,
        rat_int(3) * n.clone() / (avg.clone() + rat_int(2)),
        tf && avg_ge2,
        "requires a triangle-free graph with average degree >= 2",
    ));
    entries.push(entry(
        "tf_sparse_15_29",
        Target::Forest,
        rat_int(15) * n.clone() / rat_int(29),
        tf && avg_le4,
        "requires a triangle-free graph with average degree <= 4",
    ));
    entries.push(entry(
        "tf_sparse_half",
        Target::Forest,
        (n.clone() + rat_int(1)) / rat_int(2),
        tf && avg_le4,
        "requires a triangle-free graph with average degree <= 4",
    ));
    entries.push(entry(
        "avg_degree_general",
        Target::Forest,
        rat_int(2) * n.clone() / (avg.clone() + rat_int(1)),
        avg_ge2,
        "requires average degree >= 2",
    ));
    entries.push(entry(
        "max_degree_general",
        Target::Forest,
        rat_int(2) * n.clone() / rat_int(dmax + 1),
        dmax >= 1,
        "requires at least one edge",
    ));
    entries.push(entry(
        "clique_max_degree",
        Target::Forest,
        rat_int(6) * n.clone() / rat_int(2 * dmax + omega + 2),
        dmax >= 1,
        "requires at least one edge",
    ));
    entries.push(entry(
        "k4_free_max_degree",
        Target::Forest,
        rat_int(6) * n.clone() / rat_int(2 * dmax + 5),
        dmax >= 1 && omega <= 3,
        "requires a K4-free graph with at least one edge",
    ));
    entries.push(entry(
        "a3_max_degree",
        Target::LinearK(3),
        rat_int(2) * n.clone() / rat_int(dmax + 1),
        dmax >= 1,
        "requires at least one edge",
    ));
    // Kq-free entries for q near the clique number; q = omega + 1 is the
    // sharp choice and gets flagged.
    let q_lo = 5.max(omega + 1);
    for q in q_lo..=omega + 3 {
        let mut e = entry(
            &format!("kq_free_q{q}"),
            Target::LinearK(4),
            rat_int(6) * n.clone() / rat_int(2 * dmax + q + 1),
            true,
            "",
        );
        e.tight_q = q == omega + 1;
        entries.push(e);
    }

    let best_applicable = entries
        .iter()
        .filter(|e| e.applicable && e.target == Target::Forest)
        .map(|e| (e.id.clone(), crate::ratio::ceil_i64(&e.value)))
        .max_by_key(|(_, c)| *c);

    Ok(BoundReport {
        graph_label: label.to_string(),
        n: g.n(),
        m: g.m(),
        stats,
        entries,
        best_applicable,
    })
}

/// 3n/(d+2) for triangle-free graphs of average degree d >= 2. Convexity
/// places this under the triangle-free potential sum whenever no vertex is
/// isolated; that relation is re-checked here because it is cheap and the
/// callers lean on it.
pub fn jensen_floor(g: &Graph) -> Result<Rat, BoundsError> {
    if !g.is_triangle_free() {
        return Err(BoundsError::NotApplicable(
            "requires a triangle-free graph".into(),
        ));
    }
    let n = g.n();
    if n == 0 {
        return Err(BoundsError::NotApplicable("empty graph".into()));
    }
    let avg = rat(2 * g.m() as i64, n as i64);
    if avg < rat_int(2) {
        return Err(BoundsError::NotApplicable(
            "requires average degree >= 2".into(),
        ));
    }
    let floor = rat_int(3) * rat_usize(n) / (avg + rat_int(2));
    if g.min_degree() >= 1 {
        debug_assert!(
            potential_sum(g, PotentialKind::TriangleFree) >= floor,
            "potential sum fell under its Jensen floor"
        );
    }
    Ok(floor)
}

#[derive(Debug, Clone, Serialize)]
pub struct StepUnitViolation {
    pub delta: usize,
    pub d: usize,
    pub q: usize,
    #[serde(serialize_with = "crate::ratio::serialize_rat")]
    pub lhs: Rat,
    #[serde(serialize_with = "crate::ratio::serialize_rat")]
    pub rhs: Rat,
}

const RANGE_CAP: usize = 10_000;

fn check_range(lo: usize, hi: usize) -> Result<(), BoundsError> {
    if lo < 5 || hi < lo || hi > RANGE_CAP {
        return Err(BoundsError::InvalidRange(format!(
            "need 5 <= lo <= hi <= {RANGE_CAP}, got [{lo},{hi}]"
        )));
    }
    Ok(())
}

fn tf_table(delta: usize) -> Vec<Rat> {
    (0..=delta)
        .map(|d| potential(PotentialKind::TriangleFree, d))
        .collect()
}

/// f(d-q) - f(d) >= q (f(D-1) - f(D)) for all D in range, 2 <= d <= D,
/// 0 <= q <= d. Returns every violated triple (expected: none).
pub fn check_step_unit_at_max(lo: usize, hi: usize) -> Result<Vec<StepUnitViolation>, BoundsError> {
    check_range(lo, hi)?;
    let mut out = Vec::new();
    for delta in lo..=hi {
        let f = tf_table(delta);
        let unit = f[delta - 1].clone() - f[delta].clone();
        for d in 2..=delta {
            for q in 0..=d {
                let lhs = f[d - q].clone() - f[d].clone();
                let rhs = rat_usize(q) * unit.clone();
                if lhs < rhs {
                    out.push(StepUnitViolation {
                        delta,
                        d,
                        q,
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// The strengthened step unit for vertices of degree under D:
/// f(d-q) - f(d) >= q (f(D-2) - f(D-1)) for 2 <= d < D, 0 <= q <= d.
pub fn check_step_unit_below_max(lo: usize, hi: usize) -> Result<Vec<StepUnitViolation>, BoundsError> {
    check_range(lo, hi)?;
    let mut out = Vec::new();
    for delta in lo..=hi {
        let f = tf_table(delta);
        let unit = f[delta - 2].clone() - f[delta - 1].clone();
        for d in 2..delta {
            for q in 0..=d {
                let lhs = f[d - q].clone() - f[d].clone();
                let rhs = rat_usize(q) * unit.clone();
                if lhs < rhs {
                    out.push(StepUnitViolation {
                        delta,
                        d,
                        q,
                        lhs,
                        rhs,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Case3Violation {
    pub delta: usize,
    pub t: usize,
    #[serde(serialize_with = "crate::ratio::serialize_rat")]
    pub chain: Rat,
    #[serde(serialize_with = "crate::ratio::serialize_rat")]
    pub closed_form: Rat,
}

/// The worst-case potential change of the third deletion case, in two
/// shapes that must agree and be nonnegative for every D in range and
/// every 0 < t < D:
///
///   chain  = f(D-t) - f(D) - t f(D) + t(t-1)(f(D-1) - f(D))
///                          + t(D-t)(f(D-2) - f(D-1))
///   closed = 3t ((D-t)^2 + (t-2)^2 + D - 4) / (D (D+1) (D+2) (D-t+2))
pub fn check_case3_identity(lo: usize, hi: usize) -> Result<Vec<Case3Violation>, BoundsError> {
    check_range(lo, hi)?;
    let mut out = Vec::new();
    for delta in lo..=hi {
        let f = tf_table(delta);
        let d = delta as i64;
        for t in 1..delta {
            let ti = t as i64;
            let chain = f[delta - t].clone() - f[delta].clone()
                - rat_usize(t) * f[delta].clone()
                + rat_int(ti * (ti - 1)) * (f[delta - 1].clone() - f[delta].clone())
                + rat_int(ti * (d - ti)) * (f[delta - 2].clone() - f[delta - 1].clone());
            let num = 3 * ti * ((d - ti) * (d - ti) + (ti - 2) * (ti - 2) + d - 4);
            let den = d * (d + 1) * (d + 2) * (d - ti + 2);
            let closed_form = rat(num, den);
            if chain != closed_form || closed_form < rat_int(0) {
                out.push(Case3Violation {
                    delta,
                    t,
                    chain,
                    closed_form,
                });
            }
        }
    }
    Ok(out)
}

/// f is non-increasing: f(d) >= f(d+1) for all d < d_max.
pub fn check_potential_monotone(kind: PotentialKind, d_max: usize) -> Vec<usize> {
    (0..d_max)
        .filter(|&d| potential(kind, d) < potential(kind, d + 1))
        .collect()
}

/// Forward differences of f shrink: f(d-1) - f(d) <= f(d-2) - f(d-1) for
/// d >= 3 (the step from 1 to 2 is the lone exception, hence the floor).
pub fn check_potential_convex(kind: PotentialKind, d_max: usize) -> Vec<usize> {
    (3..=d_max)
        .filter(|&d| {
            potential(kind, d - 1) - potential(kind, d)
                > potential(kind, d - 2) - potential(kind, d - 1)
        })
        .collect()
}

/// 1/4 > 3/r - 3/(r+2) for r >= 5: trading a quarter of potential for a
/// swap never pays past degree five.
pub fn check_swap_inequality(r_max: usize) -> Vec<usize> {
    (5..=r_max)
        .filter(|&r| rat(1, 4) <= rat(3, r as i64) - rat(3, r as i64 + 2))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::catalog;
    use crate::ratio::ceil_i64;

    #[test]
    fn potential_values() {
        let f = |d| potential(PotentialKind::TriangleFree, d);
        assert_eq!(f(0), rat_int(1));
        assert_eq!(f(1), rat_int(1));
        assert_eq!(f(2), rat(3, 4));
        assert_eq!(f(5), rat(3, 7));
        let g = |d| potential(PotentialKind::General, d);
        assert_eq!(g(1), rat_int(1));
        assert_eq!(g(2), rat(2, 3));
        assert_eq!(g(5), rat(1, 3));
    }

    #[test]
    fn potential_sums() {
        assert_eq!(
            potential_sum(&catalog::cycle(5), PotentialKind::TriangleFree),
            rat(15, 4)
        );
        assert_eq!(
            potential_sum(&catalog::star(6), PotentialKind::General),
            rat(16, 3)
        );
        let k1 = crate::graph::Graph::from_edges(1, &[]).unwrap();
        assert_eq!(potential_sum(&k1, PotentialKind::General), rat_int(1));
    }

    #[test]
    fn report_on_k7() {
        let r = closed_form_bounds(&catalog::complete(7), "K7").unwrap();
        let e = r.entry("clique_max_degree").unwrap();
        assert!(e.applicable);
        assert_eq!(e.value, rat_int(2));
        assert!(!r.entry("potential_triangle_free").unwrap().applicable);
        // 2n/(d+1) = 14/7, also exactly 2.
        assert_eq!(r.entry("avg_degree_general").unwrap().value, rat_int(2));
        assert_eq!(r.best_applicable.as_ref().unwrap().1, 2);
    }

    #[test]
    fn report_on_petersen() {
        let r = closed_form_bounds(&catalog::petersen(), "petersen").unwrap();
        assert_eq!(r.entry("amt_n_minus_m4").unwrap().value, rat(25, 4));
        assert_eq!(r.entry("shi_xu_component_sum").unwrap().value, rat(120, 19));
        assert_eq!(r.entry("tf_avg_degree").unwrap().value, rat_int(6));
        assert_eq!(r.entry("potential_triangle_free").unwrap().value, rat_int(6));
        assert_eq!(r.entry("a3_max_degree").unwrap().value, rat_int(5));
        let kq = r.entry("kq_free_q5").unwrap();
        assert!(kq.applicable && !kq.tight_q);
        assert_eq!(kq.value, rat(60, 12));
        // Best a-level bound is the potential / Jensen value 25/4 -> 7.
        assert_eq!(r.best_applicable.as_ref().unwrap().1, 7);
    }

    #[test]
    fn kq_entries_track_omega() {
        let r = closed_form_bounds(&catalog::complete(6), "K6").unwrap();
        let ids: Vec<&str> = r
            .entries
            .iter()
            .filter(|e| e.id.starts_with("kq_free_q"))
            .map(|e| e.id.as_str())
            .collect();
        assert_eq!(ids, ["kq_free_q7", "kq_free_q8", "kq_free_q9"]);
        let tight = r.entry("kq_free_q7").unwrap();
        assert!(tight.tight_q);
        // 6*6/(10+7+1) = 2 = a4(K6).
        assert_eq!(tight.value, rat_int(2));
    }

    #[test]
    fn no_kq_entries_for_edgeless() {
        let g = crate::graph::Graph::from_edges(3, &[]).unwrap();
        let r = closed_form_bounds(&g, "empty3").unwrap();
        assert!(r.entries.iter().all(|e| !e.id.starts_with("kq_free_")));
        assert!(!r.entry("max_degree_general").unwrap().applicable);
        assert!(!r.entry("clique_max_degree").unwrap().applicable);
        // Potential sum of an edgeless graph is n, and that is best.
        assert_eq!(r.best_applicable.as_ref().unwrap().1, 3);
    }

    #[test]
    fn empty_graph_is_rejected() {
        let g = crate::graph::Graph::from_edges(0, &[]).unwrap();
        assert!(matches!(
            closed_form_bounds(&g, "null"),
            Err(BoundsError::NotApplicable(_))
        ));
    }

    #[test]
    fn jensen_floor_values() {
        assert_eq!(jensen_floor(&catalog::cycle(5)).unwrap(), rat(15, 4));
        assert_eq!(
            jensen_floor(&catalog::complete_bipartite(3, 3)).unwrap(),
            rat(18, 5)
        );
        assert!(matches!(
            jensen_floor(&catalog::path(4)),
            Err(BoundsError::NotApplicable(_))
        ));
        assert!(matches!(
            jensen_floor(&catalog::complete(4)),
            Err(BoundsError::NotApplicable(_))
        ));
    }

    #[test]
    fn jensen_is_tight_on_regular_graphs() {
        for g in [catalog::cycle(6), catalog::complete_bipartite(4, 4)] {
            let s = potential_sum(&g, PotentialKind::TriangleFree);
            assert_eq!(s, jensen_floor(&g).unwrap());
        }
    }

    #[test]
    fn step_unit_spot_value_and_clean_sweep() {
        // Delta=5, d=2, q=2: 1 - 3/4 >= 2 (3/6 - 3/7).
        let f = |d| potential(PotentialKind::TriangleFree, d);
        assert!(f(0) - f(2) >= rat_int(2) * (f(4) - f(5)));
        assert!(check_step_unit_at_max(5, 12).unwrap().is_empty());
        assert!(check_step_unit_below_max(5, 12).unwrap().is_empty());
    }

    #[test]
    fn check_range_is_validated() {
        assert!(matches!(
            check_step_unit_at_max(4, 10),
            Err(BoundsError::InvalidRange(_))
        ));
        assert!(matches!(
            check_step_unit_at_max(6, 5),
            Err(BoundsError::InvalidRange(_))
        ));
        assert!(matches!(
            check_case3_identity(5, 20_000),
            Err(BoundsError::InvalidRange(_))
        ));
    }

    #[test]
    fn case3_spot_value() {
        // Delta=5, t=1: 3 * (16 + 1 + 1) / (5*6*7*6) = 3/70.
        let v = check_case3_identity(5, 5).unwrap();
        assert!(v.is_empty());
        let f = tf_table(5);
        let chain = f[4].clone() - f[5].clone() - f[5].clone()
            + rat_int(0) * (f[4].clone() - f[5].clone())
            + rat_int(4) * (f[3].clone() - f[4].clone());
        assert_eq!(chain, rat(3, 70));
    }

    #[test]
    fn sweeps_are_clean() {
        assert!(check_potential_monotone(PotentialKind::TriangleFree, 200).is_empty());
        assert!(check_potential_monotone(PotentialKind::General, 200).is_empty());
        assert!(check_potential_convex(PotentialKind::TriangleFree, 200).is_empty());
        assert!(check_swap_inequality(200).is_empty());
    }

    #[test]
    fn report_serializes() {
        let r = closed_form_bounds(&catalog::cycle(5), "C5").unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["n"], 5);
        let first = &json["entries"][0];
        assert_eq!(first["id"], "potential_general");
        assert!(first["value"]["num"].is_string());
        assert_eq!(first["target"], "a");
    }

    #[test]
    fn ceil_of_best_applicable_on_c5() {
        let r = closed_form_bounds(&catalog::cycle(5), "C5").unwrap();
        let (_, best) = r.best_applicable.clone().unwrap();
        assert_eq!(best, 4);
        assert_eq!(ceil_i64(&r.entry("amt_n_minus_m4").unwrap().value), 4);
    }
}
