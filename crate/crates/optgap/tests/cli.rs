use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn optgap(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optgap"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("OPTGAP_STEP_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn decimal(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn list_shows_six_families() {
    let dir = tempfile::tempdir().unwrap();
    let o = optgap(&["list"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.contains("lp κ=1 L2"));
    assert!(text.contains("portfolio κ=2 L1"));

    let o = optgap(&["list", "--json"], dir.path());
    let entries: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = entries.as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["lp", "portfolio", "channel", "nn", "wasserstein", "sivp"]);
    assert_eq!(entries[0]["kappa"], "1/1");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(optgap(&["list", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(optgap(&["gap", "knapsack"], dir.path()).status.code(), Some(2));
    assert_eq!(optgap(&["fool", "lp", "cover"], dir.path()).status.code(), Some(2));
    assert_eq!(optgap(&["fool", "lp", "--tol", "-1/2"], dir.path()).status.code(), Some(2));
    assert_eq!(optgap(&["validate", "lp", "--samples", "1"], dir.path()).status.code(), Some(2));
}

#[test]
fn gap_tables_report_kappa() {
    let dir = tempfile::tempdir().unwrap();
    let o = optgap(&["gap", "portfolio"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("portfolio-gap.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,side,x0,x1,value,distance_to_other_side,kappa");
    assert_eq!(lines.clone().count(), 32);
    assert!(lines.all(|l| l.ends_with(",2.000000000000")));

    let o = optgap(&["gap", "sivp", "--json"], dir.path());
    let text = stdout(&o);
    assert!(text.contains("computed=1.082392200292") && text.contains("sqrt(2) = 1.414213562373"));
    assert!(dir.path().join("sivp-gap.json").exists() && !dir.path().join("sivp-gap.csv").exists());

    let o = optgap(&["gap", "nn", "--depth", "4"], dir.path());
    assert!(stdout(&o).contains("κ=6") && stdout(&o).contains("stated 8"));
    let table = read_json(&dir.path().join("nn-gap.json"));
    assert_eq!(table["rows"].as_array().unwrap().len(), 8);
    assert_eq!(table["family"]["discrepancy"], true);
}

#[test]
fn fool_exit_codes_follow_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let o = optgap(&["fool", "lp", "vertex", "--precision", "8"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let report = read_json(&dir.path().join("lp-vertex-fool.json"));
    assert!(decimal(&report["max_error_decimal"]) >= 0.499);
    assert_eq!(report["consumed_precision"], 8);
    assert_eq!(report["replay_identical"], true);
    assert!(!report["below"]["queries"].as_array().unwrap().is_empty());
    assert!(dir.path().join("lp-vertex-fool.meta.json").exists());

    let o = optgap(&["fool", "channel", "blahut-arimoto", "--iters", "500"], dir.path());
    assert_eq!(o.status.code(), Some(0));

    let o = optgap(&["fool", "lp", "cheating-reference"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not achieved"));
}

#[test]
fn validate_prints_every_condition() {
    let dir = tempfile::tempdir().unwrap();
    let o = optgap(&["validate", "lp"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for label in ["(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)", "(vii)"] {
        assert!(text.contains(&format!("  {label} ")), "missing {label}");
    }
    let report = read_json(&dir.path().join("lp-validate.json"));
    assert_eq!(report["conditions"].as_array().unwrap().len(), 7);
    assert_eq!(report["samples"], 50);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"precision": 8, "seed": 9, "formats": ["csv"]}"#).unwrap();
    let o = optgap(&["fool", "lp", "--config", cfg.to_str().unwrap(), "--precision", "12"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("consumed precision 12"));
    assert!(dir.path().join("lp-vertex-fool.csv").exists());
    assert!(!dir.path().join("lp-vertex-fool.json").exists());

    std::fs::write(&cfg, r#"{"precision": 8, "unknown": true}"#).unwrap();
    assert_eq!(optgap(&["fool", "lp", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
}

#[test]
fn step_budget_exhaustion_leaves_partial_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_optgap"))
        .args(["gap", "channel", "--out"])
        .arg(dir.path())
        .env("OPTGAP_STEP_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let table = read_json(&dir.path().join("channel-gap.json"));
    assert!(table["incomplete"].as_str().unwrap().contains("step budget"));
    let csv = std::fs::read_to_string(dir.path().join("channel-gap.csv")).unwrap();
    assert!(csv.starts_with("t,side,x0,x1,x2,value"));
}

#[test]
fn repeated_runs_write_identical_reports() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        optgap(&["fool", "wasserstein", "--seed", "3"], dir.path());
    }
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("wasserstein-argmax-fool.json")).unwrap();
    assert_eq!(read(&a), read(&b));
}
