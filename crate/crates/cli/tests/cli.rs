use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sl-spectra"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

const DCR: [&str; 6] = ["--preset", "dcr", "--D", "1", "--k0", "0.75"];

#[test]
fn eigs_dirichlet_preset() {
    let o = run(&["eigs", "--preset", "dirichlet", "--modes", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    for (n, l) in floats(&r["eigenvalues"]).iter().enumerate() {
        let e = -((n + 1) as f64 * PI).powi(2);
        assert!((l - e).abs() < 1e-8 * e.abs());
    }
}

#[test]
fn eigs_dcr_writes_files_and_case_study() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["eigs"];
    args.extend(DCR);
    args.extend(["--modes", "10", "--out", dir.path().to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["decomposition.json", "residuals.csv", "report.json", "manifest.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let r = read_json(&dir.path().join("report.json"));
    let cs = &r["case_study"]["spectrum"];
    let s = floats(&cs["s"]);
    let lambda = floats(&cs["lambda"]);
    assert_eq!(s.len(), 10);
    for ((s, l), res) in s.iter().zip(&lambda).zip(floats(&cs["residuals"])) {
        assert!((l + s * s).abs() < 1e-12);
        assert!(res <= 1e-10);
    }
    let dec = read_json(&dir.path().join("decomposition.json"));
    assert_eq!(dec["schema_version"], 1);
    assert_eq!(dec["problem"]["bc_a"], serde_json::json!([1.0, -1.0]));
    let m = read_json(&dir.path().join("manifest.json"));
    assert_eq!(m["command"], "eigs");
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    let csv = std::fs::read_to_string(dir.path().join("residuals.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn malformed_expression_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(
        &cfg,
        r#"{"interval": [0, 1], "p": "exp(", "q": "0", "rho": "1", "bc_a": [0, 1], "bc_b": [0, 1]}"#,
    )
    .unwrap();
    let o = run(&["eigs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("byte 4"));
    let o = run(&["eigs", "--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let o = run(&["eigs"]);
    assert_eq!(code(&o), 1);
    let o = run(&["no-such-command"]);
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn custom_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("neumann.json");
    std::fs::write(
        &cfg,
        r#"{"interval": [0, 1], "p": "1", "q": "0", "rho": "1", "bc_a": [1, 0], "bc_b": [1, 0]}"#,
    )
    .unwrap();
    let o = run(&["eigs", "--config", cfg.to_str().unwrap(), "--modes", "2"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    let l = floats(&r["eigenvalues"]);
    assert!(l[0].abs() < 1e-9);
    assert_eq!(r["stability"]["stable"], false);
}

#[test]
fn simulate_at_time_zero_returns_projection() {
    let o = run(&[
        "simulate",
        "--preset",
        "dirichlet",
        "--x0",
        "sin(pi*z)",
        "--times",
        "0",
        "--modes",
        "8",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    // ‖sin(πz)‖² = 1/2
    assert!((floats(&r["rho_norms"])[0] - 0.5f64.sqrt()).abs() < 1e-10);
}

#[test]
fn simulate_dcr_with_oracle_and_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate"];
    args.extend(DCR);
    args.extend(["--x0", "1", "--times", "0,0.05,0.1,0.5", "--alpha", "0.5", "--verify"]);
    args.extend(["--out", dir.path().to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&dir.path().join("report.json"));
    let d = floats(&r["oracle"]["l2_discrepancy"]);
    assert!(d[1..].iter().all(|&x| x <= 1e-3), "{d:?}");
    let a = floats(&r["alpha_norms"]);
    assert!(a.windows(2).all(|w| w[1] < w[0]));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.starts_with("t,"));
}

#[test]
fn simulate_rejects_bad_input() {
    let base = ["simulate", "--preset", "dirichlet", "--modes", "4"];
    let mut a = base.to_vec();
    a.extend(["--x0", "z", "--times", "0.2,0.1"]);
    assert_eq!(code(&run(&a)), 1);
    let mut a = base.to_vec();
    a.extend(["--x0", "foo(z)", "--times", "0.1"]);
    assert_eq!(code(&run(&a)), 1);
}

/// Root of sin(s)(4s²−1) − 4s cos(s) in ((n−1)π, (n−1)π + π/2).
fn root(n: usize) -> f64 {
    let g = |s: f64| s.sin() * (4.0 * s * s - 1.0) - 4.0 * s * s.cos();
    let (mut lo, mut hi) = ((n - 1) as f64 * PI, (n - 1) as f64 * PI + PI / 2.0);
    let up = g(hi) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == up {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn observe_both_endpoints() {
    let mut args = vec!["observe"];
    args.extend(DCR);
    args.extend(["--z0", "0", "--modes", "50"]);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = stdout_json(&o);
    let s50 = root(50);
    let expect = 2.0 * 2f64.sqrt() / (4.0 * s50 * s50 + 5.0).sqrt();
    assert!((r["minimum"].as_f64().unwrap() - expect).abs() < 1e-12);
    assert_eq!(r["verdict"], true);

    let mut args = vec!["observe"];
    args.extend(DCR);
    args.extend(["--z0", "1", "--modes", "50"]);
    let o = run(&args);
    assert_eq!(code(&o), 0);
    assert!(stdout_json(&o)["max_disagreement"].as_f64().unwrap() <= 1e-8);

    let mut args = vec!["observe"];
    args.extend(DCR);
    args.extend(["--z0", "0.5"]);
    assert_eq!(code(&run(&args)), 1);
    assert_eq!(code(&run(&["observe", "--preset", "dirichlet"])), 1);
}

#[test]
fn observe_synthetic_zero_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("syn.json");
    std::fs::write(&p, r#"{"z0": 0, "values": [0.9, 0.4, 0.0, 0.1]}"#).unwrap();
    let o = run(&["observe", "--synthetic", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let r = stdout_json(&o);
    assert_eq!(r["verdict"], false);
    assert_eq!(r["vanishing"], serde_json::json!([3]));
}

#[test]
fn verify_suites() {
    let o = run(&["verify", "--suite", "core"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["failed"], 0);

    let o = run(&["verify", "--suite", "casestudy", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = stdout_json(&o);
    let poincare = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "Poincare inequality on corpus")
        .unwrap();
    assert_eq!(poincare["detail"], "1000/1000 pass");

    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 1);
}

#[test]
fn verify_all_aggregates() {
    let o = run(&["verify", "--suite", "all", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    let suites: std::collections::BTreeSet<_> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["suite"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(suites.len(), 5);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let mut args = vec!["eigs"];
        args.extend(DCR);
        args.extend(["--modes", "8", "--out", d.path().to_str().unwrap()]);
        assert_eq!(code(&run(&args)), 0);
    }
    for f in ["decomposition.json", "residuals.csv", "report.json"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let one = run(&["verify", "--suite", "fracspace", "--seed", "11"]);
    let two = run(&["verify", "--suite", "fracspace", "--seed", "11"]);
    assert_eq!(one.stdout, two.stdout);
}

#[test]
fn thread_cap_from_environment() {
    let o = bin()
        .env("SL_SPECTRA_THREADS", "1")
        .args(["eigs", "--preset", "dirichlet", "--modes", "4"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let serial = stdout_json(&o);
    let o = bin()
        .env("SL_SPECTRA_THREADS", "0")
        .args(["eigs", "--preset", "dirichlet", "--modes", "4"])
        .output()
        .unwrap();
    assert_eq!(stdout_json(&o), serial);
    let o = bin()
        .env("SL_SPECTRA_THREADS", "many")
        .args(["eigs", "--preset", "dirichlet"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
}
