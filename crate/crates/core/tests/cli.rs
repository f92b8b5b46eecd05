use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn specpol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specpol"))
        .args(args)
        .env("SPECPOL_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap_or_default().to_string()
}

#[test]
fn numrange_writes_boundary_and_region() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = specpol(&["numrange", "--model", "ellipse-block:3", "--angles", "90", "--out", out]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(header(&dir.path().join("boundary.csv")), "theta,s,re,im");
    let region = read_json(&dir.path().join("region.json"));
    assert_eq!(region["support"].as_array().unwrap().len(), 90);
    assert_eq!(region["empty"], false);

    let only_json = TempDir::new().unwrap();
    let run = specpol(&["numrange", "--model", "delay", "--dim", "6", "--format", "json", "--out", only_json.path().to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    assert!(only_json.path().join("region.json").exists());
    assert!(!only_json.path().join("boundary.csv").exists());
}

#[test]
fn numrange_reads_matrix_files() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("m.json");
    fs::write(&path, r#"{"rows":2,"cols":2,"entries":[[1,0],[0,0],[0,0],[-1,0]]}"#).unwrap();
    let run = specpol(&["numrange", "--matrix", path.to_str().unwrap(), "--angles", "8", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let text = fs::read_to_string(dir.path().join("boundary.csv")).unwrap();
    let s: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(s.len(), 8);
    assert!((s[0] - 1.0).abs() < 1e-12 && (s[4] - 1.0).abs() < 1e-12);

    fs::write(&path, r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#).unwrap();
    let run = specpol(&["numrange", "--matrix", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&run), 2);
    let run = specpol(&["numrange", "--matrix", "/nonexistent/m.json"]);
    assert_eq!(code(&run), 1);
}

#[test]
fn essrange_estimates_empty_set() {
    let dir = TempDir::new().unwrap();
    let run = specpol(&[
        "essrange", "--model", "diag-alternating", "--starts", "11,21,41", "--width", "16", "--clip=-10,10,-10,10", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let est = read_json(&dir.path().join("estimate.json"));
    assert_eq!(est["empty"], true);
    assert_eq!(est["windows"].as_array().unwrap().len(), 3);
}

#[test]
fn galerkin_inject_and_hypothesis_exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = specpol(&["galerkin", "--model", "delay", "--sizes", "2,3", "--out", out]);
    assert_eq!(code(&run), 0);
    let text = fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "n,dim,eig_index,re,im");
    assert_eq!(text.lines().count(), 1 + 4 + 6);

    let run = specpol(&["inject", "--model", "delay", "--target", "2,0", "--vdim", "4", "--out", out]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let plan = read_json(&dir.path().join("plan.json"));
    assert_eq!(plan["achieved"].as_array().unwrap().len(), 1);

    let run = specpol(&["inject", "--model", "delay", "--target=-5,0", "--vdim", "4", "--out", out]);
    assert_eq!(code(&run), 5);
}

#[test]
fn truncate_then_classify() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let run = specpol(&["truncate", "--model", "advdiff-const", "--s", "4,5,6,7", "--density", "20", "--out", out]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(header(&dir.path().join("spectra.csv")), "s,N,eig_index,re,im,retained");

    let exact = dir.path().join("exact.csv");
    fs::write(&exact, "re,im\n").unwrap();
    let spectra = dir.path().join("spectra.csv");
    let region = dir.path().join("region.json");
    let run = specpol(&[
        "classify", "--spectra", spectra.to_str().unwrap(), "--region", region.to_str().unwrap(), "--exact",
        exact.to_str().unwrap(), "--out", out,
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let report = read_json(&dir.path().join("report.json"));
    let points = report["points"].as_array().unwrap();
    assert!(!points.is_empty());
    assert!(points.iter().all(|p| p["verdict"] == "pollution-candidate"));
}

#[test]
fn usage_and_parse_errors() {
    assert_eq!(code(&specpol(&["--bogus"])), 1);
    assert_eq!(code(&specpol(&["--help"])), 0);
    assert_eq!(code(&specpol(&["essrange", "--model", "{not json"])), 2);
    assert_eq!(code(&specpol(&["essrange", "--model", "ellipse-block:2"])), 1);
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&specpol(&["scenario", "airy", "--set", "gamma=1", "--out-dir", out])), 2);
    assert_eq!(code(&specpol(&["scenario", "no-such-scenario", "--out-dir", out])), 1);
}

#[test]
fn scenario_runs_are_reproducible() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        let run = specpol(&["scenario", "diag-empty", "--set", "width=12", "--out-dir", dir.path().to_str().unwrap()]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    }
    let same = |name: &str| fs::read(a.path().join(name)).unwrap() == fs::read(b.path().join(name)).unwrap();
    assert!(same("estimate.json"));
    let (ma, mb) = (read_json(&a.path().join("manifest.json")), read_json(&b.path().join("manifest.json")));
    assert_eq!(ma["config_hash"], mb["config_hash"]);
    assert_eq!(ma["config"]["width"], 12);
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert!(ma["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn scenario_config_file_and_failing_checks() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    // Exit 4 exactly when a check in the manifest failed.
    fs::write(&cfg, r#"{"starts":[1,2,3],"width":4}"#).unwrap();
    let run = specpol(&["scenario", "diag-empty", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()]);
    let manifest = read_json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["scenario"], "diag-empty");
    assert_eq!(manifest["config"]["starts"], serde_json::json!([1, 2, 3]));
    let all_passed = manifest["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true);
    assert_eq!(code(&run), if all_passed { 0 } else { 4 });
}
