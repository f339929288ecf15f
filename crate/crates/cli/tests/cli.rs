use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_surface-kz"))
}

#[test]
fn dims_writes_the_documented_rows() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for (g, n, row) in [(1, 1, "1,0,1"), (2, 1, "1,0,2"), (1, 2, "1,1,1")] {
        let st = bin().args(["dims", "--g", &g.to_string(), "--n", &n.to_string(), "--out", d]).status().unwrap();
        assert!(st.success());
        let csv = std::fs::read_to_string(dir.path().join("hilbert.csv")).unwrap();
        assert!(csv.lines().any(|l| l == row), "g={g} n={n}: {csv}");
        let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("hilbert.json")).unwrap()).unwrap();
        assert_eq!(json["g"], g);
        let modules = std::fs::read_to_string(dir.path().join("modules.csv")).unwrap();
        assert!(modules.starts_with("module,degree,dim\nM_1,0,"));
        assert!(dir.path().join("modules.json").exists());
    }
}

#[test]
fn report_is_json_lines_with_a_trailing_summary() {
    let out = bin().args(["run", "--suite", "algebra", "--seed", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let (summary, records) = lines.split_last().unwrap();
    assert_eq!(summary["summary"], true);
    assert_eq!(summary["total"].as_u64().unwrap() as usize, records.len());
    assert_eq!(summary["config"]["seed"], 3);
    assert!(records.iter().all(|r| r["suite"] == "algebra" && r["pass"] == true));
}

#[test]
fn flatness_reports_commutation_under_budget() {
    let out = bin().args(["--suite", "flatness", "--no-timestamp"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let comm: Value = text.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()).find(|r| r["check"] == "commutation").unwrap();
    assert!(comm["residual"].as_f64().unwrap() < comm["budget"].as_f64().unwrap());
    assert!(!text.contains("\"timestamp\":1"));
}

#[test]
fn config_file_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"g": 2, "n": 2, "suite": "algebra", "algebra_degree": 2}"#).unwrap();
    let out = bin().args(["--config", cfg.to_str().unwrap(), "--n", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let summary: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!((summary["config"]["g"].as_u64(), summary["config"]["n"].as_u64()), (Some(2), Some(3)));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"Pmax": 0}"#).unwrap();
    for args in [
        vec!["--config", cfg.to_str().unwrap(), "--suite", "algebra"],
        vec!["--config", "/nonexistent/config.json"],
        vec!["--g", "3"],
        vec!["--tol", "0"],
        vec!["--n", "1", "--suite", "simplicial"],
    ] {
        let out = bin().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("usage error"));
    }
    let out = bin().args(["--suite", "algebra"]).env("SURFACE_KZ_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failures_exit_with_one_and_are_listed() {
    let out = bin().args(["--suite", "forms", "--safety", "1e-30"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAILED forms/"));
    let out = bin().args(["--suite", "algebra", "--out", "/nonexistent/dir/r.jsonl"]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn thread_cap_does_not_change_the_report() {
    let run = |threads: &str| {
        let out = bin().args(["--suite", "holonomy", "--no-timestamp"]).env("SURFACE_KZ_THREADS", threads).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(run("1"), run("3"));
}
