//! Batch experiments: generate graph families from a config file, run
//! every applicable method on each graph, and summarize how tight the
//! closed-form bounds are.
//!
//! The config is a flat key-value file. Top-level keys set caps and
//! output options; each `[family]` block describes one generator call:
//!
//! ```text
//! exact_cap = 24
//! workers = 2
//!
//! [family]
//! kind = gnp
//! n = 12
//! p = 0.3
//! count = 5
//! seed = 42
//! ```
//!
//! Records come back in input order regardless of worker interleaving,
//! so output is reproducible byte for byte given the config.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::bounds::{closed_form_bounds, BoundReport, Target};
use crate::constructive::{construct_triangle_free_forest, replay_trace, BaseSolverConfig};
use crate::exact::{self, ExactError};
use crate::generate::{generate, Family, GenError, GeneratorSpec};
use crate::graph::Graph;
use crate::ratio::ceil_i64;
use crate::regularize::{extract_best_copy, regularize, RegError, DEFAULT_BLOWUP_CAP};
use crate::search::{certify, counting_bound, search, LexVariant, SearchError, SearchOptions};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Generation(#[from] GenError),
}

#[derive(Debug, Clone)]
pub struct FamilyBlock {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub count: usize,
    pub name: Option<String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    /// Run the exact solver on graphs up to this many vertices.
    pub exact_cap: usize,
    /// Node budget shared by all exact solves.
    pub exact_budget: u64,
    /// Treat any guarantee violation as fatal (the CLI exits nonzero).
    pub strict: bool,
    pub workers: usize,
    /// Also run the regularize-search-extract pipeline on non-regular
    /// graphs.
    pub regularize: bool,
    /// Optional CSV output path, used by the CLI.
    pub csv: Option<String>,
    pub families: Vec<FamilyBlock>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            exact_cap: 24,
            exact_budget: 5_000_000,
            strict: false,
            workers: 1,
            regularize: false,
            csv: None,
            families: Vec::new(),
        }
    }
}

fn bad(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

fn take<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, ExperimentError> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|_| bad(format!("cannot parse {key} = {raw}"))),
    }
}

fn require<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<T, ExperimentError> {
    take(map, key)?.ok_or_else(|| bad(format!("family block is missing {key}")))
}

fn finish_block(map: BTreeMap<String, String>) -> Result<FamilyBlock, ExperimentError> {
    let kind: String = require(&map, "kind")?;
    let family = match kind.as_str() {
        "gnp" => Family::Gnp {
            p: require(&map, "p")?,
        },
        "random_regular" => Family::RandomRegular {
            d: require(&map, "d")?,
        },
        "bipartite_random" => Family::BipartiteRandom {
            p: require(&map, "p")?,
        },
        "triangle_free_rejection" => Family::TriangleFreeRejection {
            p: require(&map, "p")?,
        },
        "kq_free_greedy" => Family::KqFreeGreedy {
            q: require(&map, "q")?,
            target_m: require(&map, "target_m")?,
        },
        "named" => Family::Named {
            id: require(&map, "id")?,
        },
        "exhaustive_small" => Family::ExhaustiveSmall,
        other => return Err(bad(format!("unknown family kind {other}"))),
    };
    let n = take(&map, "n")?.unwrap_or(0);
    let fixed_size = matches!(
        &family,
        Family::Named { id } if id == "petersen" || id == "k55_minus_pm"
    );
    if n == 0 && !fixed_size {
        return Err(bad(format!("family {kind} needs n >= 1")));
    }
    for key in map.keys() {
        if !matches!(
            key.as_str(),
            "kind" | "n" | "p" | "d" | "q" | "target_m" | "id" | "seed" | "count" | "name"
        ) {
            return Err(bad(format!("unknown family key {key}")));
        }
    }
    Ok(FamilyBlock {
        family,
        n,
        seed: take(&map, "seed")?.unwrap_or(0),
        count: take(&map, "count")?.unwrap_or(1),
        name: map.get("name").cloned(),
    })
}

/// Parses the flat key-value config format shown in the module docs.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    let mut cfg = ExperimentConfig::default();
    let mut block: Option<BTreeMap<String, String>> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "[family]" {
            if let Some(map) = block.take() {
                cfg.families.push(finish_block(map)?);
            }
            block = Some(BTreeMap::new());
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(bad(format!("line {}: expected key = value", lineno + 1)));
        };
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if let Some(map) = block.as_mut() {
            map.insert(key, value);
            continue;
        }
        match key.as_str() {
            "exact_cap" => cfg.exact_cap = value.parse().map_err(|_| bad("bad exact_cap"))?,
            "exact_budget" => {
                cfg.exact_budget = value.parse().map_err(|_| bad("bad exact_budget"))?
            }
            "strict" => cfg.strict = value.parse().map_err(|_| bad("bad strict"))?,
            "workers" => cfg.workers = value.parse().map_err(|_| bad("bad workers"))?,
            "regularize" => cfg.regularize = value.parse().map_err(|_| bad("bad regularize"))?,
            "csv" => cfg.csv = Some(value),
            other => return Err(bad(format!("unknown top-level key {other}"))),
        }
    }
    if let Some(map) = block.take() {
        cfg.families.push(finish_block(map)?);
    }
    if cfg.families.is_empty() {
        return Err(bad("config declares no [family] blocks"));
    }
    Ok(cfg)
}

/// Instantiates every family block into labeled graphs, bumping the seed
/// once per repetition.
pub fn expand(cfg: &ExperimentConfig) -> Result<Vec<(String, Graph)>, ExperimentError> {
    let mut out = Vec::new();
    for block in &cfg.families {
        for k in 0..block.count.max(1) {
            let spec = GeneratorSpec {
                family: block.family.clone(),
                n: block.n,
                seed: block.seed + k as u64,
            };
            let base = match &block.name {
                Some(name) if block.count > 1 => format!("{name}[{k}]"),
                Some(name) => name.clone(),
                None => spec.label(),
            };
            let graphs = generate(&spec)?;
            let many = graphs.len() > 1;
            for (j, g) in graphs.into_iter().enumerate() {
                let label = if many { format!("{base}#{j}") } else { base.clone() };
                out.push((label, g));
            }
        }
    }
    Ok(out)
}

/// One method run on one graph. `floor_ceil` is the integer bound the
/// method's own guarantee promises, when it has one.
#[derive(Debug, Clone, Serialize)]
pub struct MethodResult {
    pub method: String,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor_ceil: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub floor_met: Option<bool>,
    pub millis: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub graph_label: String,
    pub n: usize,
    pub m: usize,
    pub bounds: BoundReport,
    pub methods: Vec<MethodResult>,
    /// Completed exact optima by target name ("a", "a3", "a4").
    pub exact: BTreeMap<String, usize>,
    pub violations: Vec<String>,
}

/// Minimum slack of one bound entry against the exact optimum, across the
/// graphs where it applied and the exact solver finished.
#[derive(Debug, Clone, Serialize)]
pub struct BoundTightness {
    pub id: String,
    pub applicable: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_exact_slack: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharp_on: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodTightness {
    pub method: String,
    pub runs: usize,
    pub floor_misses: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_slack: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentSummary {
    pub graphs: usize,
    pub bound_rows: Vec<BoundTightness>,
    pub method_rows: Vec<MethodTightness>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub summary: ExperimentSummary,
}

fn millis_since(t0: Instant) -> u64 {
    t0.elapsed().as_millis() as u64
}

/// Runs every applicable method on one graph and collects guarantee
/// violations. Pure function of (label, graph, config).
pub fn evaluate_graph(label: &str, g: &Graph, cfg: &ExperimentConfig) -> ExperimentRecord {
    let bounds = closed_form_bounds(g, label).expect("experiment graphs are nonempty");
    let stats = bounds.stats.clone();
    let regular = stats.delta_max == stats.delta_min;
    let mut methods = Vec::new();
    let mut exact_done = BTreeMap::new();
    let mut violations: Vec<String> = Vec::new();

    let base_cfg = BaseSolverConfig {
        exact_cap: cfg.exact_cap,
        exact_budget: cfg.exact_budget,
        ..BaseSolverConfig::default()
    };
    let opts = SearchOptions::default();

    if stats.triangle_free {
        let t0 = Instant::now();
        match construct_triangle_free_forest(g, &base_cfg) {
            Ok((cert, trace)) => {
                let replay_err = replay_trace(g, &trace).err().map(|e| e.to_string());
                let ok = cert.meets_bound && replay_err.is_none();
                if let Some(e) = &replay_err {
                    violations.push(format!("tf_construct replay: {e}"));
                }
                methods.push(MethodResult {
                    method: "tf_construct".into(),
                    size: cert.size,
                    floor_ceil: Some(cert.bound_ceil),
                    floor_met: Some(ok),
                    millis: millis_since(t0),
                    note: replay_err,
                });
            }
            Err(e) => {
                violations.push(format!("tf_construct: {e}"));
                methods.push(MethodResult {
                    method: "tf_construct".into(),
                    size: 0,
                    floor_ceil: None,
                    floor_met: Some(false),
                    millis: millis_since(t0),
                    note: Some(e.to_string()),
                });
            }
        }
    }

    let mut variants = Vec::new();
    if stats.omega <= 3 {
        variants.push(LexVariant::K4);
    }
    if stats.omega >= 4 {
        variants.push(LexVariant::Kq(stats.omega + 1));
    }
    variants.push(LexVariant::A3);
    for variant in variants {
        let method = format!("search:{}", variant.id());
        let t0 = Instant::now();
        match search(g, &variant, None, &opts) {
            Ok(state) => {
                let cert = certify(g, &state, &variant);
                if !cert.all_passed {
                    let names: Vec<&str> = cert
                        .failures()
                        .iter()
                        .map(|c| c.name.as_str())
                        .collect();
                    violations.push(format!(
                        "{method}: certificates failed at convergence: {}",
                        names.join(", ")
                    ));
                }
                // The counting chain needs regularity for the forest and
                // linear-3 variants; a failure there on an irregular graph
                // is expected, not a violation.
                let chain_required = match variant {
                    LexVariant::Kq(_) => true,
                    LexVariant::K4 | LexVariant::A3 => regular,
                };
                let (floor_ceil, floor_met, note) = match counting_bound(g, &state, &variant) {
                    Ok(report) => {
                        if !report.meets_floor {
                            violations.push(format!(
                                "{method}: converged size {} under floor {}",
                                report.size, report.floor_ceil
                            ));
                        }
                        (
                            Some(report.floor_ceil),
                            Some(report.meets_floor && cert.all_passed),
                            None,
                        )
                    }
                    Err(e) => {
                        if chain_required {
                            violations.push(format!("{method}: {e}"));
                        }
                        (None, None, Some(e.to_string()))
                    }
                };
                methods.push(MethodResult {
                    method,
                    size: state.s.len(),
                    floor_ceil,
                    floor_met,
                    millis: millis_since(t0),
                    note,
                });
            }
            Err(SearchError::Incomplete(state)) => {
                methods.push(MethodResult {
                    method,
                    size: state.s.len(),
                    floor_ceil: None,
                    floor_met: None,
                    millis: millis_since(t0),
                    note: Some("hit the move limit before converging".into()),
                });
            }
            Err(e) => {
                methods.push(MethodResult {
                    method,
                    size: 0,
                    floor_ceil: None,
                    floor_met: None,
                    millis: millis_since(t0),
                    note: Some(e.to_string()),
                });
            }
        }
    }

    if g.n() <= cfg.exact_cap {
        for (target, name) in [
            (Target::Forest, "a"),
            (Target::LinearK(3), "a3"),
            (Target::LinearK(4), "a4"),
        ] {
            let method = format!("exact:{name}");
            let t0 = Instant::now();
            match exact::solve(g, target, Some(cfg.exact_budget)) {
                Ok(result) => {
                    // The optimum must clear every applicable closed-form
                    // bound aimed at this target; a miss is a soundness
                    // break, not a method weakness.
                    let floor = bounds
                        .entries
                        .iter()
                        .filter(|e| e.applicable && e.target == target)
                        .map(|e| ceil_i64(&e.value))
                        .max();
                    let met = floor.map(|f| result.optimum as i64 >= f);
                    if met == Some(false) {
                        violations.push(format!(
                            "{method}: optimum {} under a proven bound of {}",
                            result.optimum,
                            floor.unwrap()
                        ));
                    }
                    exact_done.insert(name.to_string(), result.optimum);
                    methods.push(MethodResult {
                        method,
                        size: result.optimum,
                        floor_ceil: floor,
                        floor_met: met,
                        millis: millis_since(t0),
                        note: None,
                    });
                }
                Err(ExactError::Incomplete(partial)) => {
                    methods.push(MethodResult {
                        method,
                        size: partial.optimum,
                        floor_ceil: None,
                        floor_met: None,
                        millis: millis_since(t0),
                        note: Some("node budget exhausted".into()),
                    });
                }
                Err(e) => {
                    methods.push(MethodResult {
                        method,
                        size: 0,
                        floor_ceil: None,
                        floor_met: None,
                        millis: millis_since(t0),
                        note: Some(e.to_string()),
                    });
                }
            }
        }
    }

    if cfg.regularize && !regular && stats.delta_max >= 1 {
        let (result, violation) = run_pipeline(g, &bounds, &base_cfg, &opts);
        methods.push(result);
        violations.extend(violation);
    }

    ExperimentRecord {
        graph_label: label.to_string(),
        n: g.n(),
        m: g.m(),
        bounds,
        methods,
        exact: exact_done,
        violations,
    }
}

/// Regularize, solve on the host by the clique-number route, and project
/// the best copy back. The projected set must clear the general
/// clique/degree bound on the original graph.
fn run_pipeline(
    g: &Graph,
    bounds: &BoundReport,
    base_cfg: &BaseSolverConfig,
    opts: &SearchOptions,
) -> (MethodResult, Option<String>) {
    let t0 = Instant::now();
    let omega = bounds.stats.omega;
    let route = match omega {
        0..=2 => "construct",
        3 => "k4",
        _ => "kq",
    };
    let method = format!("pipeline:{route}");
    let floor = bounds
        .entry("clique_max_degree")
        .filter(|e| e.applicable)
        .map(|e| ceil_i64(&e.value));
    let fail = |note: String, violation: bool| {
        let v = violation.then(|| format!("{method}: {note}"));
        (
            MethodResult {
                method: method.clone(),
                size: 0,
                floor_ceil: floor,
                floor_met: violation.then_some(false),
                millis: millis_since(t0),
                note: Some(note),
            },
            v,
        )
    };

    let reg = match regularize(g, DEFAULT_BLOWUP_CAP) {
        Ok(reg) => reg,
        // Too big to host is a capacity limit, not a broken guarantee.
        Err(e @ RegError::BlowupExceeded { .. }) => return fail(e.to_string(), false),
        Err(e) => return fail(e.to_string(), true),
    };
    if let Err(msg) = reg.check_invariants(g, reg.g_prime.n() <= 256) {
        return fail(format!("host invariants: {msg}"), true);
    }

    let host_set = match omega {
        0..=2 => match construct_triangle_free_forest(&reg.g_prime, base_cfg) {
            Ok((cert, _)) => cert.forest,
            Err(e) => return fail(e.to_string(), true),
        },
        _ => {
            let variant = if omega == 3 {
                LexVariant::K4
            } else {
                LexVariant::Kq(omega + 1)
            };
            match search(&reg.g_prime, &variant, None, opts) {
                Ok(state) => {
                    // The host is regular, so the counting chain must close.
                    if let Err(e) = counting_bound(&reg.g_prime, &state, &variant) {
                        return fail(format!("host counting bound: {e}"), true);
                    }
                    state.s
                }
                Err(SearchError::Incomplete(state)) => {
                    let size = state.s.len();
                    return fail(format!("host search unconverged at size {size}"), false);
                }
                Err(e) => return fail(e.to_string(), true),
            }
        }
    };

    let (_, projected) = match extract_best_copy(&reg, &host_set) {
        Ok(pair) => pair,
        Err(e) => return fail(e.to_string(), true),
    };
    let met = floor.map(|f| projected.len() as i64 >= f);
    let violation = (met == Some(false)).then(|| {
        format!(
            "{method}: projected size {} under floor {}",
            projected.len(),
            floor.unwrap()
        )
    });
    (
        MethodResult {
            method,
            size: projected.len(),
            floor_ceil: floor,
            floor_met: met,
            millis: millis_since(t0),
            note: None,
        },
        violation,
    )
}

fn summarize(records: &[ExperimentRecord]) -> ExperimentSummary {
    let mut bound_rows: BTreeMap<String, BoundTightness> = BTreeMap::new();
    let mut method_rows: BTreeMap<String, MethodTightness> = BTreeMap::new();
    let mut violations = Vec::new();

    for rec in records {
        for entry in &rec.bounds.entries {
            if !entry.applicable {
                continue;
            }
            let row = bound_rows
                .entry(entry.id.clone())
                .or_insert_with(|| BoundTightness {
                    id: entry.id.clone(),
                    applicable: 0,
                    min_exact_slack: None,
                    sharp_on: None,
                });
            row.applicable += 1;
            if let Some(&opt) = rec.exact.get(&entry.target.as_str()) {
                let slack = opt as i64 - ceil_i64(&entry.value);
                if row.min_exact_slack.is_none_or(|cur| slack < cur) {
                    row.min_exact_slack = Some(slack);
                    row.sharp_on = Some(rec.graph_label.clone());
                }
            }
        }
        for m in &rec.methods {
            let row = method_rows
                .entry(m.method.clone())
                .or_insert_with(|| MethodTightness {
                    method: m.method.clone(),
                    runs: 0,
                    floor_misses: 0,
                    min_slack: None,
                });
            row.runs += 1;
            if m.floor_met == Some(false) {
                row.floor_misses += 1;
            }
            if let Some(fc) = m.floor_ceil {
                let slack = m.size as i64 - fc;
                if row.min_slack.is_none_or(|cur| slack < cur) {
                    row.min_slack = Some(slack);
                }
            }
        }
        for v in &rec.violations {
            violations.push(format!("{}: {v}", rec.graph_label));
        }
    }

    ExperimentSummary {
        graphs: records.len(),
        bound_rows: bound_rows.into_values().collect(),
        method_rows: method_rows.into_values().collect(),
        violations,
    }
}

/// Expands the config and evaluates every graph on a small worker pool.
/// Each task is deterministic and results keep input order, so the output
/// does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    let graphs = expand(cfg)?;
    let slots: Vec<Mutex<Option<ExperimentRecord>>> =
        graphs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = cfg.workers.clamp(1, graphs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= graphs.len() {
                    break;
                }
                let (label, g) = &graphs[i];
                let record = evaluate_graph(label, g, cfg);
                *slots[i].lock().expect("no panics while holding the slot") = Some(record);
            });
        }
    });
    let records: Vec<ExperimentRecord> = slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("every slot filled"))
        .collect();
    let summary = summarize(&records);
    Ok(ExperimentOutput { records, summary })
}

fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// One row per (graph, method), mirroring the JSON fields exactly.
pub fn to_csv(records: &[ExperimentRecord]) -> String {
    let mut out = String::from("graph_label,n,m,method,size,floor_ceil,floor_met,millis,note\n");
    for rec in records {
        for m in &rec.methods {
            let floor_ceil = m.floor_ceil.map_or(String::new(), |v| v.to_string());
            let floor_met = m.floor_met.map_or(String::new(), |v| v.to_string());
            let note = m.note.as_deref().unwrap_or("");
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                csv_field(&rec.graph_label),
                rec.n,
                rec.m,
                csv_field(&m.method),
                m.size,
                floor_ceil,
                floor_met,
                m.millis,
                csv_field(note),
            ));
        }
    }
    out
}

/// Splits one CSV line produced by [`to_csv`], honoring quoted fields.
pub fn split_csv_line(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut in_quotes = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '"' if in_quotes && chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            '"' => in_quotes = !in_quotes,
            ',' if !in_quotes => out.push(std::mem::take(&mut cur)),
            c => cur.push(c),
        }
    }
    out.push(cur);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
exact_cap = 20
workers = 2

[family]
kind = named
id = petersen
name = pete

[family]
kind = gnp
n = 9
p = 0.3
count = 3
seed = 11
name = sparse
";

    #[test]
    fn config_round_trip_covers_all_keys() {
        let cfg = parse_config(SMALL).unwrap();
        assert_eq!(cfg.exact_cap, 20);
        assert_eq!(cfg.workers, 2);
        assert_eq!(cfg.families.len(), 2);
        assert_eq!(cfg.families[1].count, 3);
        assert_eq!(cfg.families[1].name.as_deref(), Some("sparse"));
        assert!(matches!(cfg.families[0].family, Family::Named { .. }));
    }

    #[test]
    fn config_rejects_typos_and_gaps() {
        assert!(parse_config("exact_cap = 24").is_err(), "no families");
        assert!(parse_config("[family]\nkind = gnp\nn = 5").is_err(), "missing p");
        assert!(parse_config("[family]\nkind = gnp\np = 0.5").is_err(), "missing n");
        assert!(parse_config("wat = 1\n[family]\nkind = named\nid = petersen").is_err());
        assert!(
            parse_config("[family]\nkind = gnp\nn = 5\np = 0.5\nwat = 1").is_err(),
            "unknown family key"
        );
    }

    #[test]
    fn records_preserve_input_order_across_workers() {
        let cfg = parse_config(SMALL).unwrap();
        let out1 = run_experiment(&cfg).unwrap();
        let mut serial = cfg.clone();
        serial.workers = 1;
        let out2 = run_experiment(&serial).unwrap();
        let labels1: Vec<&str> = out1.records.iter().map(|r| r.graph_label.as_str()).collect();
        let labels2: Vec<&str> = out2.records.iter().map(|r| r.graph_label.as_str()).collect();
        assert_eq!(labels1, labels2);
        assert_eq!(labels1[0], "pete");
        assert_eq!(labels1[1], "sparse[0]");
        // Full determinism, not just ordering.
        assert_eq!(
            serde_json::to_string(&out1).unwrap(),
            serde_json::to_string(&out2).unwrap()
        );
    }

    #[test]
    fn petersen_record_is_clean_and_exact() {
        let cfg = parse_config("[family]\nkind = named\nid = petersen").unwrap();
        let out = run_experiment(&cfg).unwrap();
        let rec = &out.records[0];
        assert!(rec.violations.is_empty(), "{:?}", rec.violations);
        assert_eq!(rec.exact.get("a"), Some(&7));
        let tf = rec.methods.iter().find(|m| m.method == "tf_construct").unwrap();
        assert_eq!(tf.floor_met, Some(true));
        let k4 = rec.methods.iter().find(|m| m.method == "search:k4").unwrap();
        assert_eq!(k4.floor_met, Some(true));
        assert!(k4.size >= 6);
    }

    #[test]
    fn clique_bound_is_sharp_on_complete_graphs() {
        let mut text = String::from("exact_cap = 12\n");
        for n in 2..=12 {
            text.push_str(&format!("[family]\nkind = named\nid = complete\nn = {n}\n"));
        }
        let cfg = parse_config(&text).unwrap();
        let out = run_experiment(&cfg).unwrap();
        assert!(out.summary.violations.is_empty(), "{:?}", out.summary.violations);
        for rec in &out.records {
            let entry = rec.bounds.entry("clique_max_degree").unwrap();
            assert!(entry.applicable);
            assert_eq!(ceil_i64(&entry.value), 2, "on {}", rec.graph_label);
            assert_eq!(rec.exact.get("a"), Some(&2));
        }
        let row = out
            .summary
            .bound_rows
            .iter()
            .find(|r| r.id == "clique_max_degree")
            .unwrap();
        assert_eq!(row.min_exact_slack, Some(0));
        assert_eq!(row.applicable, 11);
    }

    #[test]
    fn pipeline_runs_on_non_regular_graphs() {
        let cfg = parse_config(
            "regularize = true\nexact_cap = 10\n[family]\nkind = named\nid = path\nn = 3",
        )
        .unwrap();
        let out = run_experiment(&cfg).unwrap();
        let rec = &out.records[0];
        assert!(rec.violations.is_empty(), "{:?}", rec.violations);
        let pipe = rec
            .methods
            .iter()
            .find(|m| m.method.starts_with("pipeline:"))
            .expect("pipeline should run on a path");
        assert_eq!(pipe.method, "pipeline:construct");
        assert_eq!(pipe.floor_met, Some(true));
        assert_eq!(pipe.size, 3);
    }

    #[test]
    fn csv_matches_json_fields() {
        let cfg = parse_config(SMALL).unwrap();
        let out = run_experiment(&cfg).unwrap();
        let csv = to_csv(&out.records);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "graph_label,n,m,method,size,floor_ceil,floor_met,millis,note"
        );
        let body: Vec<&str> = lines.collect();
        let method_count: usize = out.records.iter().map(|r| r.methods.len()).sum();
        assert_eq!(body.len(), method_count);
        // Every row must agree with the record it came from, field for
        // field, including labels that need quoting.
        let mut row = 0;
        for rec in &out.records {
            for m in &rec.methods {
                let cols = split_csv_line(body[row]);
                assert_eq!(cols[0], rec.graph_label);
                assert_eq!(cols[1], rec.n.to_string());
                assert_eq!(cols[2], rec.m.to_string());
                assert_eq!(cols[3], m.method);
                assert_eq!(cols[4], m.size.to_string());
                assert_eq!(cols[5], m.floor_ceil.map_or(String::new(), |v| v.to_string()));
                assert_eq!(cols[6], m.floor_met.map_or(String::new(), |v| v.to_string()));
                assert_eq!(cols[8], m.note.clone().unwrap_or_default());
                row += 1;
            }
        }
    }

    #[test]
    fn csv_quoting_round_trips() {
        assert_eq!(
            split_csv_line("\"a,b\",2,\"say \"\"hi\"\"\""),
            vec!["a,b", "2", "say \"hi\""]
        );
    }

    #[test]
    fn strict_flag_parses() {
        let cfg =
            parse_config("strict = true\n[family]\nkind = named\nid = petersen").unwrap();
        assert!(cfg.strict);
    }
}
