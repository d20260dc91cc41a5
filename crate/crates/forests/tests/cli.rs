//! End-to-end runs of the compiled binary: every subcommand, both input
//! formats, stdin handling, and the error paths.

use std::io::Write as _;
use std::process::{Command, Output, Stdio};

use forests::generate::catalog;
use forests::io::{serialize_edgelist, serialize_graph6};
use forests::oracle;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_forests"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary exits")
}

fn json_of(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_temp(dir: &tempfile::TempDir, name: &str, content: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn bounds_reads_graph6_and_reports_entries() {
    let dir = tempfile::tempdir().unwrap();
    let g6 = serialize_graph6(&catalog::petersen()).unwrap();
    let path = write_temp(&dir, "petersen.g6", &g6);
    let v = json_of(&run(&["bounds", &path]));
    assert_eq!(v["n"], 10);
    assert_eq!(v["m"], 15);
    assert_eq!(v["stats"]["triangle_free"], true);
    assert!(v["entries"].as_array().unwrap().len() >= 10);
    assert!(v["best_applicable"].is_array());
}

#[test]
fn bounds_reads_edge_list_from_stdin() {
    let el = serialize_edgelist(&catalog::cycle(5));
    let v = json_of(&run_with_stdin(&["bounds", "-"], &el));
    assert_eq!(v["n"], 5);
    assert_eq!(v["m"], 5);
}

#[test]
fn exact_matches_the_oracle_on_a_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let g = catalog::cycle(7);
    let path = write_temp(&dir, "c7.txt", &serialize_edgelist(&g));
    let v = json_of(&run(&["exact", &path, "--k", "3"]));
    assert_eq!(
        v["optimum"].as_u64().unwrap() as usize,
        oracle::max_linear_k(&g, 3).0
    );
    assert_eq!(v["complete"], true);

    let v = json_of(&run(&["exact", &path]));
    assert_eq!(
        v["optimum"].as_u64().unwrap() as usize,
        oracle::max_forest(&g).0
    );
}

#[test]
fn construct_tf_emits_certificate_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let g = catalog::star(10);
    let path = write_temp(&dir, "star.txt", &serialize_edgelist(&g));
    let v = json_of(&run(&["construct", &path, "--method", "tf", "--trace"]));
    assert_eq!(v["method"], "tf");
    assert_eq!(v["certificate"]["size"], 10);
    assert_eq!(v["certificate"]["meets_bound"], true);
    let steps = v["steps"].as_u64().unwrap();
    assert_eq!(v["trace"].as_array().unwrap().len() as u64, steps);
}

#[test]
fn construct_with_regularize_projects_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "p3.txt", &serialize_edgelist(&catalog::path(3)));
    let v = json_of(&run(&["construct", &path, "--method", "tf", "--regularize"]));
    assert_eq!(v["copies"], 2);
    assert_eq!(v["host_n"], 6);
    assert_eq!(v["floor_met"], true);
    assert!(v["size"].as_u64().unwrap() >= 3);
}

#[test]
fn search_reports_certificates_and_floor() {
    let dir = tempfile::tempdir().unwrap();
    let g6 = serialize_graph6(&catalog::petersen()).unwrap();
    let path = write_temp(&dir, "petersen.g6", &g6);
    let v = json_of(&run(&["search", &path, "--variant", "a3"]));
    assert_eq!(v["variant"], "a3");
    assert_eq!(v["certificates"]["all_passed"], true);
    // 3-regular on 10 vertices: the counting floor is 2n/(d+1) = 5.
    assert_eq!(v["floor"]["floor_ceil"], 5);
    assert_eq!(v["floor"]["meets_floor"], true);
    assert!(v["size"].as_u64().unwrap() >= 5);
}

#[test]
fn regularize_builds_a_regular_host() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "p3.txt", &serialize_edgelist(&catalog::path(3)));
    let v = json_of(&run(&["regularize", &path]));
    assert_eq!(v["n"], 6);
    assert_eq!(v["m"], 6);
    assert_eq!(v["copies"], 2);
    assert_eq!(v["rounds"], 1);
    assert_eq!(v["copy_map"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_distinguishes_forests_from_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "c5.txt", &serialize_edgelist(&catalog::cycle(5)));
    let v = json_of(&run(&["verify", &path, "--set", "0,1,2"]));
    assert_eq!(v["induces_forest"], true);
    assert_eq!(v["induces_linear_3"], true);
    assert_eq!(v["size"], 3);

    let v = json_of(&run(&["verify", &path, "--set", "0,1,2,3,4"]));
    assert_eq!(v["induces_forest"], false);
    assert!(v["trees"].is_null());
}

#[test]
fn convert_round_trips_between_formats() {
    let dir = tempfile::tempdir().unwrap();
    let g6 = serialize_graph6(&catalog::petersen()).unwrap();
    let g6_path = write_temp(&dir, "in.g6", &g6);
    let el_path = dir.path().join("out.edges").to_string_lossy().into_owned();

    let v = json_of(&run(&["convert", &g6_path, &el_path]));
    assert_eq!(v["from"], "graph6");
    assert_eq!(v["to"], "edge_list");

    let back = run(&["convert", &el_path, "-"]);
    assert!(back.status.success());
    assert_eq!(String::from_utf8_lossy(&back.stdout).trim(), g6.trim());
}

#[test]
fn experiment_runs_config_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("rows.csv").to_string_lossy().into_owned();
    let cfg = write_temp(
        &dir,
        "exp.cfg",
        "exact_cap = 16\n\n[family]\nkind = named\nid = petersen\nname = pete\n",
    );
    let v = json_of(&run(&["experiment", "--config", &cfg, "--strict", "--csv", &csv_path]));
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["graph_label"], "pete");
    assert!(records[0]["violations"].as_array().unwrap().is_empty());

    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "graph_label,n,m,method,size,floor_ceil,floor_met,millis,note"
    );
    assert_eq!(
        lines.count(),
        records[0]["methods"].as_array().unwrap().len()
    );
}

#[test]
fn missing_file_fails_with_an_error() {
    let out = run(&["bounds", "/no/such/file"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn out_of_range_vertex_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "c5.txt", &serialize_edgelist(&catalog::cycle(5)));
    let out = run(&["verify", &path, "--set", "0,99"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("out of range"));
}
