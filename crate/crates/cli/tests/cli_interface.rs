//! Command-level behaviors: report contents, source selection, flag
//! handling, and validation messages (the exit-code contract itself is
//! exercised by the acceptance suite).

use std::path::Path;
use std::process::Command;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_spinframe")
}

fn write_config(path: &Path, v: &serde_json::Value) {
    std::fs::write(path, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

fn base(grid: usize) -> serde_json::Value {
    serde_json::json!({
        "lattice": {"basis": [1.0,0,0, 0,1.0,0, 0,0,1.0]},
        "spin": [0,0,0],
        "grid": [grid, grid, grid],
        "solver": {"count": 6, "tol": 1e-8, "max_iter": 400, "seed": 3}
    })
}

fn report(dir: &Path, stem: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(dir.join(format!("{stem}.report.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn spectrum_fully_antiperiodic_has_no_kernel_and_matches_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(8);
    cfg["spin"] = serde_json::json!([1, 1, 1]);
    cfg["solver"]["count"] = serde_json::json!(16);
    write_config(&dir.path().join("job.json"), &cfg);
    let status = Command::new(bin())
        .args(["spectrum", "--config"])
        .arg(dir.path().join("job.json"))
        .arg("--out")
        .arg(dir.path())
        .args(["--seed", "99"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let rep = report(dir.path(), "spectrum");
    // The --seed flag overrides the config and is echoed in the report.
    assert_eq!(rep["solver"]["seed"], serde_json::json!(99));
    assert_eq!(rep["kernel_dimension"], serde_json::json!(0));
    let expect = std::f64::consts::PI * 3.0f64.sqrt();
    let eigenvalues: Vec<f64> = serde_json::from_value(rep["eigenvalues"].clone()).unwrap();
    let min_abs = eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(f64::INFINITY, f64::min);
    assert!((min_abs - expect).abs() < 1e-8, "min |λ| = {min_abs}");
    let clusters = rep["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 2);
    for c in clusters {
        assert_eq!(c["multiplicity"], serde_json::json!(8));
    }
    assert_eq!(rep["all_clusters_even"], serde_json::json!(true));
    let dev = rep["oracle_comparison"]["max_abs_deviation"]
        .as_f64()
        .unwrap();
    assert!(dev <= 1e-8, "oracle deviation {dev}");
}

#[test]
fn verify_runs_dense_section_on_small_grids() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(4);
    cfg["solver"]["count"] = serde_json::json!(4);
    write_config(&dir.path().join("job.json"), &cfg);
    let status = Command::new(bin())
        .args(["verify", "--config"])
        .arg(dir.path().join("job.json"))
        .arg("--out")
        .arg(dir.path())
        .arg("--dense-oracle")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(dir.path(), "verify");
    assert_eq!(rep["pass"], serde_json::json!(true));
    assert_eq!(rep["dense_oracle"]["pass"], serde_json::json!(true));
    assert_eq!(rep["kernel"]["dimension"], serde_json::json!(2));
    assert_eq!(rep["commutation"]["pass"], serde_json::json!(true));
}

#[test]
fn dense_oracle_flag_rejects_large_grids() {
    let dir = tempfile::tempdir().unwrap();
    write_config(&dir.path().join("job.json"), &base(16));
    let out = Command::new(bin())
        .args(["verify", "--config"])
        .arg(dir.path().join("job.json"))
        .arg("--out")
        .arg(dir.path())
        .arg("--dense-oracle")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("dense"),
        "unexpected error output: {stdout}"
    );
}

#[test]
fn framing_by_index_warns_on_harmonic_source_and_proceeds() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(8);
    // count = 2 returns exactly the two harmonic (kernel) pairs.
    cfg["solver"]["count"] = serde_json::json!(2);
    cfg["framing"] = serde_json::json!({"source": {"mode": "index", "index": 0}});
    write_config(&dir.path().join("job.json"), &cfg);
    let out = Command::new(bin())
        .args(["framing", "--config"])
        .arg(dir.path().join("job.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep = report(dir.path(), "framing");
    let warnings = rep["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].as_str().unwrap().contains("harmonic"));
    assert_eq!(rep["pass"], serde_json::json!(true));
}

#[test]
fn framing_applies_configured_rescale() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(8);
    cfg["framing"] = serde_json::json!({"source": {"mode": "plane_wave", "k": [0,1,0], "sign": 1}});
    cfg["rescale"] = serde_json::json!({
        "offset": 1.3,
        "terms": [{"m": [1,0,0], "amplitude": 0.25, "phase": 0.4}]
    });
    write_config(&dir.path().join("job.json"), &cfg);
    let status = Command::new(bin())
        .args(["framing", "--config"])
        .arg(dir.path().join("job.json"))
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let rep = report(dir.path(), "framing");
    assert_eq!(rep["source"]["rescaled"], serde_json::json!(true));
    let div = rep["metrics"]["max_abs_divergence"].as_f64().unwrap();
    assert!(div <= 1e-10, "rescaled divergence {div}");
}

#[test]
fn malformed_json_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"lattice\": {\n").unwrap();
    let out = Command::new(bin())
        .args(["spectrum", "--config"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("line"), "missing line info: {stdout}");
}

#[test]
fn smallest_positive_source_needs_a_positive_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = base(8);
    cfg["solver"]["count"] = serde_json::json!(2); // kernel only
    cfg["framing"] = serde_json::json!({"source": {"mode": "smallest_positive"}});
    write_config(&dir.path().join("job.json"), &cfg);
    let out = Command::new(bin())
        .args(["framing", "--config"])
        .arg(dir.path().join("job.json"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(
        stdout.contains("solver.count"),
        "unexpected message: {stdout}"
    );
}
