//! End-to-end tests of the `cwalker` binary: exit codes, output schemas,
//! and byte-level reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cwalker"))
}

fn write_toy_graph(dir: &Path) -> PathBuf {
    let path = dir.join("toy.txt");
    std::fs::write(
        &path,
        "# two triangles bridged, plus junk the loader must drop\n\
         0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n9 9\n0 1\n",
    )
    .unwrap();
    path
}

fn write_star_graph(dir: &Path) -> PathBuf {
    let path = dir.join("star.txt");
    std::fs::write(&path, "0 1\n0 2\n0 3\n0 4\n").unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn json_of(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn estimate_happy_path_writes_report_with_config_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let out_path = dir.path().join("report.json");
    let out = run(bin()
        .args(["estimate", "--algorithm", "b", "--graph"])
        .arg(&graph)
        .args(["--budget", "20000", "--beta", "0.05", "--max-k", "8"])
        .args(["--burn-in", "100", "--seed", "7", "--log-level", "error"])
        .arg("--output")
        .arg(&out_path));
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out_path);
    assert_eq!(v["version"], "0.1.0");
    assert_eq!(v["config"]["algorithm"], "b");
    assert_eq!(v["config"]["budget"], 20000);
    assert_eq!(v["report"]["queries_used"], 20000);
    assert!(v["report"]["lambda1"].as_f64().unwrap().is_finite());
}

#[test]
fn estimate_rejects_walk_shorter_than_burn_in() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let out = run(bin()
        .args(["estimate", "--algorithm", "b", "--graph"])
        .arg(&graph)
        .args(["--walk-length", "10", "--burn-in", "100", "--log-level", "error"]));
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().last().unwrap())
            .unwrap();
    assert_eq!(err["kind"], "config");
}

#[test]
fn estimate_requires_walk_length_or_budget() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let out = run(bin()
        .args(["estimate", "--algorithm", "b", "--graph"])
        .arg(&graph)
        .args(["--log-level", "error"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimate_maps_estimation_failure_to_exit_4() {
    // Odd-length closed walks never occur on a star.
    let dir = tempfile::tempdir().unwrap();
    let graph = write_star_graph(dir.path());
    let out = run(bin()
        .args(["estimate", "--algorithm", "naive", "--k", "3", "--graph"])
        .arg(&graph)
        .args(["--budget", "2000", "--burn-in", "50", "--seed", "1"])
        .args(["--log-level", "error"]));
    assert_eq!(out.status.code(), Some(4));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).lines().last().unwrap())
            .unwrap();
    assert_eq!(err["kind"], "estimation");
}

#[test]
fn missing_graph_is_a_data_error() {
    let out = run(bin()
        .args(["exact", "--graph", "/nonexistent/graph.txt", "--log-level", "error"]));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exact_reports_dense_spectrum_on_small_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let out_path = dir.path().join("exact.json");
    let out = run(bin()
        .args(["exact", "--graph"])
        .arg(&graph)
        .args(["--log-level", "error", "--output"])
        .arg(&out_path));
    assert!(out.status.success());
    let v = json_of(&out_path);
    assert_eq!(v["method"], "dense");
    // Bridged-triangles lambda1 = 1 + sqrt(2).
    let l1 = v["lambda1"].as_f64().unwrap();
    assert!((l1 - (1.0 + 2f64.sqrt())).abs() < 1e-9);
    assert!(v["lambda3"].as_f64().is_some());
    assert_eq!(v["converged"], true);
}

#[test]
fn load_report_counts_dropped_lines() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let out_path = dir.path().join("load.json");
    let out = run(bin()
        .args(["load-report", "--graph"])
        .arg(&graph)
        .arg("--output")
        .arg(&out_path));
    assert!(out.status.success());
    let v = json_of(&out_path);
    assert_eq!(v["nodes"], 6);
    assert_eq!(v["edges"], 7);
    assert_eq!(v["dropped_self_loops"], 1);
    assert_eq!(v["dropped_duplicates"], 1);
    assert_eq!(v["lcc_nodes"], 6);
    assert_eq!(v["lcc_edges"], 7);
}

#[test]
fn identical_argv_produces_byte_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for out_path in [&out_a, &out_b] {
        let out = run(bin()
            .args(["estimate", "--algorithm", "c", "--graph"])
            .arg(&graph)
            .args(["--budget", "10000", "--burn-in", "100", "--max-k", "8"])
            .args(["--seed", "42", "--log-level", "error", "--output"])
            .arg(out_path));
        assert!(out.status.success());
    }
    // The output embeds the resolved config, not the output path, so the
    // bytes match exactly.
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
}

#[test]
fn trace_out_replays_the_walk() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let trace_a = dir.path().join("trace_a.txt");
    let trace_b = dir.path().join("trace_b.txt");
    for trace in [&trace_a, &trace_b] {
        let out = run(bin()
            .args(["estimate", "--algorithm", "a", "--k", "3", "--graph"])
            .arg(&graph)
            .args(["--walk-length", "500", "--burn-in", "20", "--seed", "3"])
            .args(["--start-node", "2", "--log-level", "error", "--output"])
            .arg(dir.path().join("r.json"))
            .arg("--trace-out")
            .arg(trace));
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read_to_string(&trace_a).unwrap();
    let b = std::fs::read_to_string(&trace_b).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 501); // start node plus 500 draws
    assert_eq!(a.lines().next(), Some("2"));
}

#[test]
fn bench_plan_emits_deterministic_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write_toy_graph(dir.path());
    let plan_path = dir.path().join("plan.json");
    let plan = serde_json::json!({
        "graph": graph,
        "algorithm": "b",
        "budgets": [2000, 5000],
        "runs": 6,
        "beta": 0.05,
        "max_k": 8,
        "burn_in": 100,
        "seed_base": 11,
        "truth_lambda1": 1.0 + 2f64.sqrt(),
        "measure_runtime": false,
        "workers": 2
    });
    std::fs::write(&plan_path, serde_json::to_string_pretty(&plan).unwrap()).unwrap();
    let csv_a = dir.path().join("a.csv");
    let json_a = dir.path().join("a.json");
    let csv_b = dir.path().join("b.csv");
    let json_b = dir.path().join("b.json");
    for (csv, json) in [(&csv_a, &json_a), (&csv_b, &json_b)] {
        let out = run(bin()
            .args(["bench", "--plan"])
            .arg(&plan_path)
            .arg("--csv")
            .arg(csv)
            .arg("--json")
            .arg(json)
            .args(["--log-level", "error"]));
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert_eq!(std::fs::read(&csv_a).unwrap(), std::fs::read(&csv_b).unwrap());
    assert_eq!(std::fs::read(&json_a).unwrap(), std::fs::read(&json_b).unwrap());
    let text = std::fs::read_to_string(&csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "graph,algorithm,Q,runs,mean_estimate,truth,rel_error,nrmse,ci_low,ci_high,\
         mean_runtime_s,missing_runs"
    );
    assert_eq!(lines.count(), 2);
    let v = json_of(&json_a);
    assert_eq!(v["version"], "0.1.0");
    assert_eq!(v["config"]["runs"], 6);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn bad_plan_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let plan_path = dir.path().join("plan.json");
    std::fs::write(&plan_path, "{\"graph\": \"g.txt\"}").unwrap();
    let out = run(bin().args(["bench", "--plan"]).arg(&plan_path).args(["--log-level", "error"]));
    assert_eq!(out.status.code(), Some(2));
}
