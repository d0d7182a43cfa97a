//! End-to-end checks of the command-line surface: subcommands, file
//! formats, and exit codes (0 ok, 1 validation failure, 2 check failure).

use std::path::Path;
use std::process::{Command, Output};

fn priorfree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_priorfree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn benchmark_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let bids = dir.path().join("bids.json");
    write(&bids, "[1, 1, 4, 4]");
    let out = priorfree(&["benchmark", "--bids", bids.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["f2"], 8);
    assert_eq!(v["m2"], 10);
    assert_eq!(v["m2_discretized"], 10);
    assert_eq!(v["ladder"], serde_json::json!([1, 1, 4, 4]));

    // newline-delimited bids parse the same
    let nl = dir.path().join("bids.txt");
    write(&nl, "1\n1\n4\n4\n");
    let out2 = priorfree(&["benchmark", "--bids", nl.to_str().unwrap()]);
    assert_eq!(out.stdout, out2.stdout);
}

#[test]
fn run_subcommand_and_validation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bids = dir.path().join("bids.json");
    write(&bids, "[5, 1, 3]");
    let out = priorfree(&["run", "--mechanism", "fixed:3", "--bids", bids.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["revenue"], 6);
    assert_eq!(v["allocations"], serde_json::json!([true, false, true]));

    // same seed, same outcome
    let a = priorfree(&["run", "--mechanism", "hybrid", "--bids", bids.to_str().unwrap(), "--seed", "9"]);
    let b = priorfree(&["run", "--mechanism", "hybrid", "--bids", bids.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);

    let bad = priorfree(&["run", "--mechanism", "vickrey", "--bids", bids.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let missing = priorfree(&["benchmark", "--bids", "/nonexistent/bids.json"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn verify_lemmas_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let bids = dir.path().join("bids.json");
    write(&bids, "[4, 4, 4, 4]");
    let out = priorfree(&[
        "verify-lemmas",
        "--bids",
        bids.to_str().unwrap(),
        "--trials",
        "20000",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["checks"]["e1_floor"], true);
    assert_eq!(v["report"]["e2_vacuous"], true);
}

#[test]
fn audit_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let bids = dir.path().join("bids.json");
    write(&bids, "[2, 7, 5]");
    let out = priorfree(&[
        "audit-truthfulness",
        "--mechanism",
        "hybrid",
        "--bids",
        bids.to_str().unwrap(),
        "--grid-max",
        "8",
        "--seeds",
        "8",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["violations"], serde_json::json!([]));
}

#[test]
fn generate_and_simulate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let bids = dir.path().join("generated.json");
    let out = priorfree(&[
        "generate",
        "--family",
        "iid-uniform",
        "--n",
        "6",
        "--lo",
        "1",
        "--hi",
        "9",
        "--seed",
        "5",
        "--output",
        bids.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let generated: Vec<u64> =
        serde_json::from_str(&std::fs::read_to_string(&bids).unwrap()).unwrap();
    assert_eq!(generated.len(), 6);

    let config = dir.path().join("config.json");
    write(
        &config,
        r#"{
            "generator": {"family": "iid-uniform", "n": 8, "lo": 1, "hi": 32},
            "mechanism": {"name": "hybrid"},
            "instances": 2,
            "trials": 500,
            "seed": 11
        }"#,
    );
    let report_path = dir.path().join("report.json");
    let csv_path = dir.path().join("report.csv");
    let out = priorfree(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["instances"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let bad = priorfree(&["generate", "--family", "nope"]);
    assert_eq!(bad.status.code(), Some(1));
}
