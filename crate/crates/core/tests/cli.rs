use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anderson-lab"))
        .args(args)
        .output()
        .unwrap()
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anderson-lab"))
        .args(args)
        .env("ANDERSON_LAB_THREADS", threads)
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn classify_reports_certificate() {
    let out = run(&["classify", "--dims", "5", "--potential", "1,1,-1,-1,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "BadCertified");
    assert_eq!(v["certificate"]["reason"]["kind"], "vanishing-at-fixed-point");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn marginal_failure_exits_inconclusive() {
    let out = run(&[
        "classify",
        "--dims",
        "3,3",
        "--dist",
        "uniform:-1,1",
        "--seed",
        "4",
        "--gap-tol",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "Inconclusive");
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["classify", "--dims", "2"],
        vec!["exact", "--L", "9"],
        vec!["heatmap", "--dims", "5", "--t-grid", "2:1:5"],
        vec!["bound", "--dims", "3,3", "--p", "1.5"],
        vec!["classify", "--dims", "5", "--potential", "1,1"],
        vec!["enumerate", "--dims", "4,4"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn exact_and_bound_values() {
    let exact = json(&run(&["exact", "--L", "7"]));
    assert_eq!(exact["bad_probability"].as_f64(), Some(0.78125));
    let bound = json(&run(&["bound", "--dims", "3,3"]));
    assert_eq!(bound["lower_bound"].as_f64(), Some(7.0 / 256.0));
}

#[test]
fn heatmap_is_byte_identical_across_runs_and_threads() {
    let args = ["heatmap", "--dims", "12", "--t-grid", "0.1:10:7", "--seed", "7"];
    let a = run_with_threads(&args, "1");
    let b = run_with_threads(&args, "4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,k,lambda,log_ipr"));
    assert_eq!(lines.count(), 7 * 12);
}

#[test]
fn mc_is_thread_independent() {
    let args = ["mc", "--dims", "3,3", "--p", "0.3", "--trials", "80", "--seed", "12"];
    let a = run_with_threads(&args, "1");
    let b = run_with_threads(&args, "3");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn paths_on_four_cycle() {
    let v = json(&run(&["paths", "--dims", "4", "--from", "2", "--to", "0"]));
    assert_eq!(v["paths"], serde_json::json!([[2, 1, 0], [2, 3, 0]]));
    let sum = v["path_sum"].as_f64().unwrap();
    assert!((sum - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn selftest_passes_and_injection_fails() {
    assert_eq!(run(&["selftest"]).status.code(), Some(0));
    let bad = run(&["selftest", "--inject-eigh-tol", "1e-30"]);
    assert_ne!(bad.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("eigensolver-residual"));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("anderson-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("exact.json");
    let out = run(&["exact", "--L", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["bad_probability"].as_f64(), Some(1.0));
    std::fs::remove_dir_all(&dir).unwrap();
}
