use std::path::PathBuf;
use std::process::{Command, Output};

fn rumin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rumin")).args(args).env_remove("RUMIN_THREADS").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

fn zero_rows(csv: &str) -> usize {
    csv.lines().skip(1).filter(|l| l.split(',').nth(2).map(|v| v.parse::<f64>().unwrap() == 0.0).unwrap_or(false)).count()
}

fn temp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rumin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn sphere_rumin_spectrum_has_constant_kernel() {
    let o = rumin(&["spectrum", "--model", "s3", "--op", "delta-rn", "--max-weight", "4", "--degree", "0", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    assert!(csv.starts_with("degree,block,eigenvalue,multiplicity,nu,lambda10,lambda01\n"));
    assert!(zero_rows(&csv) >= 1);
}

#[test]
fn twisted_lens_has_no_zero_rows() {
    let o = rumin(&["spectrum", "--model", "lens", "--p", "2", "--character", "1", "--degree", "0", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    assert_eq!(zero_rows(&stdout(&o)), 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&rumin(&["spectrum", "--max-weight", "-1"])), 2);
    assert_eq!(code(&rumin(&["spectrum", "--op", "delta-x"])), 2);
    assert_eq!(code(&rumin(&["torsion", "--s-grid", "2,0.5"])), 2);
    assert_eq!(code(&rumin(&["verify", "--model", "lens", "--p", "3", "--character", "3"])), 2);
    assert_eq!(code(&rumin(&["verify", "--t-samples", "0"])), 2);
}

#[test]
fn full_suite_passes_on_sphere() {
    let o = rumin(&["verify", "--suite", "all", "--model", "s3", "--max-weight", "4"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&o);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["report"]["schema"], 1);
    assert!(!doc["report"]["checks"].as_array().unwrap().is_empty());
}

#[test]
fn reeb_suite_passes_on_twisted_lens() {
    let o = rumin(&["verify", "--suite", "thm5", "--model", "lens", "--p", "3", "--character", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn impossible_tolerance_fails_with_residuals() {
    let o = rumin(&["verify", "--suite", "thm1", "--tol", "1e-30"]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.lines().any(|l| l.starts_with("FAIL ") && l.contains("residual=")), "{err}");
    // The report is still written.
    assert_eq!(json(&o)["schema"], 1);
}

#[test]
fn torsion_on_sphere_is_finite_and_passes() {
    let o = rumin(&["torsion", "--model", "s3", "--s-grid", "2,3"]);
    assert_eq!(code(&o), 0);
    let t = &json(&o)["torsion"];
    let kappa = t["kappa"].as_array().unwrap();
    assert_eq!(kappa.len(), 2);
    assert!(kappa.iter().all(|k| k["lhs"].as_f64().unwrap().is_finite()));
    assert_eq!(t["passed"], true);
}

#[test]
fn torsion_on_untwisted_lens_counts_constants() {
    let o = rumin(&["torsion", "--model", "lens", "--p", "2", "--character", "0"]);
    assert_eq!(code(&o), 0);
    let t = &json(&o)["torsion"];
    assert_eq!(t["passed"], true);
    assert_eq!(t["cohomology"][0], 1);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["torsion", "--model", "lens", "--p", "3", "--character", "1", "--max-weight", "5"];
    let a = rumin(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_rumin")).args(args).env("RUMIN_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flags_override_config_file_and_file_overrides_defaults() {
    let cfg = temp("run.json");
    std::fs::write(&cfg, r#"{"model": "lens", "p": 3, "character": 1, "max_weight": 3, "format": "csv"}"#).unwrap();
    let path = cfg.to_str().unwrap();
    let from_file = stdout(&rumin(&["spectrum", "--config", path, "--degree", "0"]));
    assert!(from_file.starts_with("degree,"));
    assert!(from_file.lines().skip(1).all(|l| l.contains("/p3l1")));
    assert!(!from_file.contains(",m4/"));
    let overridden = rumin(&["spectrum", "--config", path, "--character", "0", "--format", "json", "--degree", "0"]);
    let doc = json(&overridden);
    assert_eq!(doc["config"]["character"], 0);
    assert_eq!(doc["config"]["max_weight"], 3);
    std::fs::write(&cfg, r#"{"colour": "blue"}"#).unwrap();
    assert_eq!(code(&rumin(&["spectrum", "--config", path])), 2);
}

#[test]
fn out_flag_writes_file() {
    let out = temp("spectrum.csv");
    let o = rumin(&["spectrum", "--degree", "1", "--max-weight", "2", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&out).unwrap().starts_with("degree,"));
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_rumin")).args(["spectrum"]).env("RUMIN_THREADS", "zero").output().unwrap();
    assert_eq!(code(&o), 2);
}
