use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use numsparse::mtx::{save_matrix_market, save_vector};
use numsparse::{DenseMatrix, MatrixLike};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_numsparse"));
    c.env_remove("NUMSPARSE_CONSTANTS");
    c
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        save_matrix_market(&DenseMatrix::identity(4), dir.path().join("I4.mtx")).unwrap();
        let a = DenseMatrix::random_gaussian(24, 8, 11);
        save_matrix_market(&a, dir.path().join("A.mtx")).unwrap();
        save_matrix_market(&DenseMatrix::random_gaussian(8, 6, 12), dir.path().join("B.mtx")).unwrap();
        let b: Vec<f64> = (0..24).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        save_vector(&b, dir.path().join("b.vec")).unwrap();
        Self { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn sparsify_identity_is_deterministic() {
    let fx = Fixture::new();
    let args = ["sparsify", "--a", "I4.mtx", "--eps", "0.5", "--seed", "7"];
    let (r1, r2) = (run_in(fx.path(), &args), run_in(fx.path(), &args));
    assert!(r1.status.success());
    let (j1, j2) = (report(&r1), report(&r2));
    assert_eq!(serde_json::to_string(&j1["metrics"]).unwrap(), serde_json::to_string(&j2["metrics"]).unwrap());
    assert_eq!(j1["metrics"]["nnz"], 4);
    assert_eq!(j1["metrics"]["spectral_error"], 0.0);
    assert_eq!(j1["seed"], 7);
}

#[test]
fn ridge_check_passes() {
    let fx = Fixture::new();
    let out = run_in(
        fx.path(),
        &["ridge", "--a", "A.mtx", "--b", "b.vec", "--lambda", "0.5", "--eps", "1e-3", "--seed", "3", "--check"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let j = report(&out);
    assert!(j["metrics"]["energy_ratio"].as_f64().unwrap() <= 1e-3);
    assert!(j["metrics"]["identity_gap"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn ridge_writes_solution() {
    let fx = Fixture::new();
    let out = run_in(
        fx.path(),
        &["ridge", "--a", "A.mtx", "--b", "b.vec", "--lambda", "2", "--eps", "0.01", "--out", "x.vec"],
    );
    assert!(out.status.success());
    let x = numsparse::mtx::load_vector(fx.file("x.vec")).unwrap();
    assert_eq!(x.len(), 8);
}

#[test]
fn hardinstance_divisibility_is_a_usage_error() {
    let out = bin().args(["hardinstance", "--n", "4", "--k", "4", "--eps", "0.1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("divide") && err.contains("m = n/k"), "{err}");
}

#[test]
fn hardinstance_probe_and_output() {
    let fx = Fixture::new();
    let out = run_in(fx.path(), &["hardinstance", "--n", "128", "--k", "4", "--eps", "0.1", "--out", "inst.mtx"]);
    assert!(out.status.success());
    let j = report(&out);
    let ratio = j["metrics"]["s_star_over_predicted"].as_f64().unwrap();
    assert!((0.25..=4.0).contains(&ratio), "{ratio}");
    let m = numsparse::mtx::load_matrix_market(fx.file("inst.mtx")).unwrap();
    assert_eq!(m.shape(), (128, 128));
    assert_eq!(j["details"]["probe"].as_array().unwrap().len(), 129);
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = bin().args(["sparsify", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    let out = bin().args(["frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_file_is_io_error() {
    let out = bin().args(["sparsify", "--a", "/nonexistent.mtx", "--eps", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonexistent"));
}

#[test]
fn failing_gate_exits_two() {
    let fx = Fixture::new();
    // a budget of one expected sample cannot reach 1% spectral error
    let out =
        run_in(fx.path(), &["sparsify", "--a", "A.mtx", "--eps", "0.01", "--budget", "1", "--trials", "20", "--check"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out)["metrics"]["check_passed"], false);
}

#[test]
fn constants_precedence() {
    let fx = Fixture::new();
    let write = |name: &str, c: f64| {
        std::fs::write(fx.file(name), format!(r#"{{"version":1,"c_over":{c},"c_l1":1,"c_mz":1}}"#)).unwrap();
    };
    write("flag.json", 0.5);
    write("env.json", 2.0);
    let args = ["sparsify", "--a", "A.mtx", "--eps", "0.5", "--constants", "flag.json"];
    let budget = |out: &Output| report(out)["metrics"]["budget_s"].as_f64().unwrap();
    let flag = run_in(fx.path(), &args);
    let env = bin().current_dir(fx.path()).env("NUMSPARSE_CONSTANTS", "env.json").args(args).output().unwrap();
    assert!((budget(&env) / budget(&flag) - 4.0).abs() < 1e-9);
    let bad = run_in(fx.path(), &["sparsify", "--a", "A.mtx", "--eps", "0.5", "--constants", "missing.json"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn report_flag_writes_file() {
    let fx = Fixture::new();
    let out = run_in(fx.path(), &["amm", "--a", "A.mtx", "--b", "B.mtx", "--eps", "0.5", "--report", "r.json"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let j: Value = serde_json::from_str(&std::fs::read_to_string(fx.file("r.json")).unwrap()).unwrap();
    assert_eq!(j["subcommand"], "amm");
    assert!(j["metrics"]["pairs_sampled"].as_u64().unwrap() > 0);
}

#[test]
fn sparsify_writes_sample() {
    let fx = Fixture::new();
    let out = run_in(fx.path(), &["sparsify", "--a", "A.mtx", "--eps", "0.5", "--scheme", "l1-rows", "--out", "s.mtx"]);
    assert!(out.status.success());
    let s = numsparse::mtx::load_matrix_market(fx.file("s.mtx")).unwrap();
    let j = report(&out);
    assert_eq!(j["metrics"]["nnz"].as_u64().unwrap() as usize, s.nnz());
    assert!(s.max_row_nnz() as u64 <= j["metrics"]["draws_per_row"].as_u64().unwrap());
}

#[test]
fn calibrate_saturated_grid_terminates() {
    let fx = Fixture::new();
    // 2^4 saturates every sampler on the calibration families
    let out = run_in(fx.path(), &["calibrate", "--trials", "100", "--eps", "0.5", "--grid", "16", "--out", "c.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let c = numsparse::calibrate::Constants::load(&fx.file("c.json")).unwrap();
    assert_eq!((c.c_over, c.c_l1, c.c_mz), (16.0, 16.0, 16.0));
}

#[test]
fn calibrate_hopeless_grid_exits_two() {
    let fx = Fixture::new();
    let out =
        run_in(fx.path(), &["calibrate", "--trials", "100", "--eps", "0.5", "--grid", "0.001", "--out", "c.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!fx.file("c.json").exists());
    let j = report(&out);
    assert!(j["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("best c")));
}
