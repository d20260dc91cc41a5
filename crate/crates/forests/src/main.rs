//! Command-line front end: every subcommand reads a graph (graph6 or edge
//! list, stdin with `-`) and prints a JSON report to stdout.

use std::path::Path;

use clap::{Parser, Subcommand};
use serde_json::json;

use forests::bitset::VertexSet;
use forests::bounds::{closed_form_bounds, Target};
use forests::constructive::{construct_triangle_free_forest, replay_trace, BaseSolverConfig};
use forests::exact;
use forests::experiment::{parse_config, run_experiment, to_csv};
use forests::graph::Graph;
use forests::io::{serialize_edgelist, serialize_graph6, GraphDocument, SourceFormat};
use forests::regularize::{extract_best_copy, regularize, RegularizedGraph, DEFAULT_BLOWUP_CAP};
use forests::search::{certify, counting_bound, search, LexVariant, SearchLimits, SearchOptions};

#[derive(Parser)]
#[command(
    name = "forests",
    about = "Lower bounds, local search, and exact solvers for induced forests",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form lower bounds and graph statistics
    Bounds { file: String },
    /// Exact optimum by branch and bound (induced forest, or linear
    /// k-forest with --k)
    Exact {
        file: String,
        /// Bound the path length: each tree must be a path with at most K
        /// edges
        #[arg(long)]
        k: Option<usize>,
        /// Give up after this many search nodes
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Build a large feasible set with a guarantee
    Construct {
        file: String,
        /// tf, k4, kq:<q>, or a3
        #[arg(long)]
        method: String,
        /// Embed into a regular host first and project the best copy back
        #[arg(long)]
        regularize: bool,
        /// Include the full step trace (tf method only)
        #[arg(long)]
        trace: bool,
    },
    /// Run the lexicographic exchange search to convergence
    Search {
        file: String,
        /// k4, kq:<q>, or a3
        #[arg(long)]
        variant: String,
        /// Consider every vertex as a move candidate instead of the
        /// distance-limited pools
        #[arg(long)]
        full_radius: bool,
        /// Shuffle candidate order reproducibly
        #[arg(long)]
        order_seed: Option<u64>,
        /// Stop after this many accepted moves
        #[arg(long)]
        max_moves: Option<u64>,
    },
    /// Embed the graph into a max-degree-regular host
    Regularize {
        file: String,
        /// Largest host size to allow
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Check a vertex set against a graph
    Verify {
        file: String,
        /// Comma-separated vertex ids, e.g. 0,2,5
        #[arg(long)]
        set: String,
    },
    /// Run a batch experiment from a config file
    Experiment {
        #[arg(long)]
        config: String,
        /// Exit nonzero on any guarantee violation
        #[arg(long)]
        strict: bool,
        /// Also write per-method rows as CSV
        #[arg(long)]
        csv: Option<String>,
    },
    /// Convert between graph6 and edge-list formats
    Convert { input: String, output: String },
}

fn main() {
    match run(Cli::parse()) {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn load(path: &str) -> Result<GraphDocument, String> {
    let (text, label) = if path == "-" {
        let mut buf = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut buf)
            .map_err(|e| format!("reading stdin: {e}"))?;
        (buf, "stdin".to_string())
    } else {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {path}: {e}"))?;
        let label = Path::new(path)
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.to_string());
        (text, label)
    };
    GraphDocument::from_text(&text, &label).map_err(|e| e.to_string())
}

fn emit(value: &impl serde::Serialize) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    println!("{text}");
    Ok(())
}

fn parse_set(g: &Graph, raw: &str) -> Result<VertexSet, String> {
    let mut ids = Vec::new();
    for part in raw.split(',').filter(|p| !p.trim().is_empty()) {
        let v: usize = part
            .trim()
            .parse()
            .map_err(|_| format!("bad vertex id {part:?}"))?;
        if v >= g.n() {
            return Err(format!("vertex {v} out of range, graph has {} vertices", g.n()));
        }
        ids.push(v);
    }
    Ok(VertexSet::from_members(g.n(), ids))
}

fn parse_variant(raw: &str) -> Result<LexVariant, String> {
    LexVariant::parse(raw).ok_or_else(|| format!("unknown variant {raw:?}, try k4, kq:<q>, or a3"))
}

fn run(cli: Cli) -> Result<i32, String> {
    match cli.cmd {
        Cmd::Bounds { file } => {
            let doc = load(&file)?;
            let report =
                closed_form_bounds(&doc.graph, &doc.label).map_err(|e| e.to_string())?;
            emit(&report)?;
        }

        Cmd::Exact { file, k, budget } => {
            let doc = load(&file)?;
            let target = match k {
                Some(k) => Target::LinearK(k),
                None => Target::Forest,
            };
            let result =
                exact::solve(&doc.graph, target, budget).map_err(|e| e.to_string())?;
            emit(&result)?;
        }

        Cmd::Construct {
            file,
            method,
            regularize: embed,
            trace,
        } => {
            let doc = load(&file)?;
            let g = &doc.graph;
            if embed {
                let value = pipeline(g, &doc.label, &method)?;
                emit(&value)?;
            } else if method == "tf" {
                let (cert, steps) =
                    construct_triangle_free_forest(g, &BaseSolverConfig::default())
                        .map_err(|e| e.to_string())?;
                replay_trace(g, &steps).map_err(|e| format!("replay failed: {e}"))?;
                let mut value = json!({
                    "method": "tf",
                    "certificate": cert,
                    "steps": steps.len(),
                });
                if trace {
                    value["trace"] = serde_json::to_value(&steps).map_err(|e| e.to_string())?;
                }
                emit(&value)?;
            } else {
                let variant = parse_variant(&method)?;
                let state = search(g, &variant, None, &SearchOptions::default())
                    .map_err(|e| e.to_string())?;
                let floor = counting_bound(g, &state, &variant).ok();
                emit(&json!({
                    "method": variant.id(),
                    "size": state.s.len(),
                    "set": state.s,
                    "floor": floor,
                }))?;
            }
        }

        Cmd::Search {
            file,
            variant,
            full_radius,
            order_seed,
            max_moves,
        } => {
            let doc = load(&file)?;
            let g = &doc.graph;
            let variant = parse_variant(&variant)?;
            let mut opts = SearchOptions {
                full_radius,
                order_seed,
                limits: SearchLimits::default(),
            };
            if let Some(mm) = max_moves {
                opts.limits.max_moves = mm;
            }
            let state = search(g, &variant, None, &opts).map_err(|e| e.to_string())?;
            let certificates = certify(g, &state, &variant);
            let floor = counting_bound(g, &state, &variant);
            emit(&json!({
                "variant": variant.id(),
                "size": state.s.len(),
                "objective": state.objective_vector,
                "state": state,
                "certificates": certificates,
                "floor": match floor {
                    Ok(report) => json!(report),
                    Err(e) => json!({ "error": e.to_string() }),
                },
            }))?;
        }

        Cmd::Regularize { file, cap } => {
            let doc = load(&file)?;
            let reg = regularize(&doc.graph, cap.unwrap_or(DEFAULT_BLOWUP_CAP))
                .map_err(|e| e.to_string())?;
            reg.check_invariants(&doc.graph, reg.g_prime.n() <= 256)
                .map_err(|e| format!("invariant check failed: {e}"))?;
            emit(&json!({
                "graph6": serialize_graph6(&reg.g_prime).map_err(|e| e.to_string())?,
                "n": reg.g_prime.n(),
                "m": reg.g_prime.m(),
                "copies": reg.copies,
                "rounds": reg.rounds,
                "copy_map": reg.copy_map,
            }))?;
        }

        Cmd::Verify { file, set } => {
            let doc = load(&file)?;
            let g = &doc.graph;
            let s = parse_set(g, &set)?;
            let forest = g.induces_forest(&s).map_err(|e| e.to_string())?;
            let trees = forest.then(|| g.tree_decomposition(&s).expect("forest checked"));
            emit(&json!({
                "set": s,
                "size": s.len(),
                "induces_forest": forest,
                "induces_linear_3": g.induces_linear_k_forest(&s, 3).map_err(|e| e.to_string())?,
                "induces_linear_4": g.induces_linear_k_forest(&s, 4).map_err(|e| e.to_string())?,
                "beta": g.beta_counts(&s).map_err(|e| e.to_string())?,
                "trees": trees,
            }))?;
        }

        Cmd::Experiment {
            config,
            strict,
            csv,
        } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| format!("reading {config}: {e}"))?;
            let mut cfg = parse_config(&text).map_err(|e| e.to_string())?;
            cfg.strict |= strict;
            if csv.is_some() {
                cfg.csv = csv;
            }
            let out = run_experiment(&cfg).map_err(|e| e.to_string())?;
            if let Some(path) = &cfg.csv {
                std::fs::write(path, to_csv(&out.records))
                    .map_err(|e| format!("writing {path}: {e}"))?;
            }
            emit(&out)?;
            if cfg.strict && !out.summary.violations.is_empty() {
                eprintln!(
                    "strict mode: {} guarantee violation(s)",
                    out.summary.violations.len()
                );
                return Ok(2);
            }
        }

        Cmd::Convert { input, output } => {
            let doc = load(&input)?;
            let (converted, to) = match doc.source_format {
                SourceFormat::Graph6 => (serialize_edgelist(&doc.graph), "edge_list"),
                SourceFormat::EdgeList => (
                    serialize_graph6(&doc.graph).map_err(|e| e.to_string())?,
                    "graph6",
                ),
            };
            if output == "-" {
                print!("{converted}");
                if !converted.ends_with('\n') {
                    println!();
                }
            } else {
                std::fs::write(&output, &converted)
                    .map_err(|e| format!("writing {output}: {e}"))?;
                emit(&json!({
                    "n": doc.graph.n(),
                    "m": doc.graph.m(),
                    "from": match doc.source_format {
                        SourceFormat::Graph6 => "graph6",
                        SourceFormat::EdgeList => "edge_list",
                    },
                    "to": to,
                    "wrote": output,
                }))?;
            }
        }
    }
    Ok(0)
}

/// Regularize, solve on the host with the requested method, and project
/// the best copy back to the input graph.
fn pipeline(g: &Graph, label: &str, method: &str) -> Result<serde_json::Value, String> {
    let reg: RegularizedGraph =
        regularize(g, DEFAULT_BLOWUP_CAP).map_err(|e| e.to_string())?;
    reg.check_invariants(g, reg.g_prime.n() <= 256)
        .map_err(|e| format!("invariant check failed: {e}"))?;
    let host = &reg.g_prime;
    let host_set = if method == "tf" {
        construct_triangle_free_forest(host, &BaseSolverConfig::default())
            .map_err(|e| format!("on the host: {e}"))?
            .0
            .forest
    } else {
        let variant = parse_variant(method)?;
        search(host, &variant, None, &SearchOptions::default())
            .map_err(|e| format!("on the host: {e}"))?
            .s
    };
    let host_size = host_set.len();
    let (copy, projected) = extract_best_copy(&reg, &host_set).map_err(|e| e.to_string())?;
    let bounds = closed_form_bounds(g, label).map_err(|e| e.to_string())?;
    let floor = bounds
        .entry("clique_max_degree")
        .filter(|e| e.applicable)
        .map(|e| forests::ratio::ceil_i64(&e.value));
    Ok(json!({
        "method": method,
        "copies": reg.copies,
        "rounds": reg.rounds,
        "host_n": host.n(),
        "host_size": host_size,
        "copy": copy,
        "size": projected.len(),
        "set": projected,
        "floor_ceil": floor,
        "floor_met": floor.map(|f| projected.len() as i64 >= f),
    }))
}
