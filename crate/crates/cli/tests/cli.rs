use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mfz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfz"))
        .args(args)
        .env_remove("MFZ_THREADS")
        .output()
        .expect("spawn mfz")
}

fn config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn cantor3(dir: &TempDir) -> PathBuf {
    config(
        dir,
        "cantor3.json",
        r#"{"preset": "cantor_convolution", "k": 3}"#,
    )
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn dims_reports_ordered_brackets() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let v = stdout_json(&mfz(&["dims", "--config", s(&cfg), "--k", "8"]));
    let lo = &v["alpha_lower"];
    assert!(lo["lower"].as_f64().unwrap() <= lo["upper"].as_f64().unwrap());
    let g = &v["gamma"]["bracket"];
    assert!(g["lower"].as_f64().unwrap() <= g["upper"].as_f64().unwrap());
    assert_eq!(v["formalism_holds"], Value::Bool(false));
}

#[test]
fn tau_hat_without_barrier_digit_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let out = mfz(&["tau-hat", "--config", s(&cfg), "--k", "6"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("barrier digit required"));
}

#[test]
fn monte_carlo_needs_a_seed() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let out = mfz(&["gamma", "--config", s(&cfg), "--k", "4", "--mode", "mc"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_config_and_bad_flags_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = config(
        &dir,
        "bad.json",
        r#"{"d": 3, "m": 2, "p": [0.5, 0.25, 0.25]}"#,
    );
    assert_eq!(
        mfz(&["describe", "--config", s(&bad)]).status.code(),
        Some(2)
    );
    let cfg = cantor3(&dir);
    let out = mfz(&["bounds", "--config", s(&cfg), "--k", "3", "--norm", "op2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let out = mfz(&[
        "bounds",
        "--config",
        s(&cfg),
        "--k",
        "12",
        "--max-words",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bounds_default_to_column_sum_norm() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let v = stdout_json(&mfz(&["bounds", "--config", s(&cfg), "--k", "5"]));
    assert_eq!(v["norm"], "op1");
    assert_eq!(v["k"], 5);
    assert!(v["lower"].as_f64().unwrap() <= v["upper"].as_f64().unwrap());
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let args = |t: &'static str| {
        vec![
            "--threads",
            t,
            "gamma",
            "--config",
            s(&cfg),
            "--k",
            "6",
            "--mode",
            "mc",
        ]
        .into_iter()
        .chain(["--seed", "7", "--samples", "5000"])
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let run = |t| {
        let a = args(t);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        let out = mfz(&refs);
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn iterate_output_round_trips_as_config() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let it = dir.path().join("it.json");
    let out = mfz(&["iterate", "--config", s(&cfg), "--k", "2", "--out", s(&it)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v = stdout_json(&mfz(&["barrier", "--config", s(&it)]));
    assert_eq!(v["level"], 1);
    let atoms: Vec<u64> = v["atoms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| a.as_u64().unwrap())
        .collect();
    assert_eq!(atoms, [5, 6, 7]);
}

#[test]
fn curves_are_csv_with_header() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let path = dir.path().join("tau.csv");
    let out = mfz(&[
        "tau",
        "--config",
        s(&cfg),
        "--k",
        "4",
        "--q-min",
        "-2",
        "--q-max",
        "2",
        "--q-step",
        "0.5",
        "--out",
        s(&path),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,value,direction"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        assert_eq!(r.len(), 3);
        r[0].parse::<f64>().unwrap();
        r[1].parse::<f64>().unwrap();
    }
    // tau(1) = 0 at every level
    let at_one = rows.iter().find(|r| r[0] == "1").unwrap();
    assert!(at_one[1].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn fh_and_dim_range_on_an_iterated_system() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let it = dir.path().join("it.json");
    assert!(
        mfz(&["iterate", "--config", s(&cfg), "--k", "2", "--out", s(&it)])
            .status
            .success()
    );
    let out = mfz(&[
        "fh",
        "--config",
        s(&it),
        "--k",
        "3",
        "--b",
        "6",
        "--q-min",
        "-4",
        "--q-max",
        "4",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,value,direction\n"));
    assert!(text.lines().count() > 10);

    let v = stdout_json(&mfz(&[
        "dim-range",
        "--config",
        s(&it),
        "--k",
        "3",
        "--b",
        "6",
    ]));
    let (lo, hi) = (v["lo"].as_f64().unwrap(), v["hi"].as_f64().unwrap());
    assert!(0.0 < lo && lo < hi);
    let beta = v["beta_k"].as_f64().unwrap();
    assert!(0.0 < beta && beta < 1.0);
}

#[test]
fn atoms_dump_has_one_row_per_atom() {
    let dir = TempDir::new().unwrap();
    let cfg = cantor3(&dir);
    let out = mfz(&["atoms", "--config", s(&cfg), "--k", "3", "--dump", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,mass_log"));
    // atoms 0..=m (d^k - 1) / (d - 1)
    assert_eq!(lines.count(), 3 * 26 / 2 + 1);
}

#[test]
fn periodic_point_of_digit_one() {
    let dir = TempDir::new().unwrap();
    let cfg = config(
        &dir,
        "c4.json",
        r#"{"preset": "cantor_convolution", "k": 4}"#,
    );
    let v = stdout_json(&mfz(&["periodic", "--config", s(&cfg), "--word", "1"]));
    let expect = (16.0f64 / 5.0).ln() / 3.0f64.ln();
    assert!((v["dim"].as_f64().unwrap() - expect).abs() < 1e-9);
}

#[test]
fn verify_fast_json_lists_every_check() {
    let out = mfz(&["verify", "--suite", "fast", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let outcomes = v["outcomes"].as_array().unwrap();
    assert_eq!(outcomes.len(), 14);
    let all = outcomes.iter().all(|o| o["passed"] == Value::Bool(true));
    assert_eq!(v["passed"], Value::Bool(all));
    assert_eq!(out.status.code(), Some(if all { 0 } else { 1 }));
}
