//! End-to-end runs of the command-line binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_nonlocal-periodic");

const CONSTANT: &str = r#"{"alpha": 1.0, "potential": {"c0": 1.0, "terms": [], "K": 0}}"#;
const TWO_LEVEL: &str =
    r#"{"alpha": 1.0, "potential": {"c0": 0.6, "terms": [{"k": 1, "c": 0.64, "s": 0.48}], "K": 1}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(path: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn forward_writes_the_classified_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "op.json", CONSTANT);
    let out = dir.path().join("s.json").to_string_lossy().into_owned();
    let plot = dir.path().join("delta.csv").to_string_lossy().into_owned();
    let o = run(&["forward", "--input", &input, "--output", &out, "--window", "40", "--emit-plot", &plot]);
    assert!(o.status.success());
    let doc = json(&out);
    let zs: Vec<(f64, u64, String)> = doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["z"].as_f64().unwrap(), e["m"].as_u64().unwrap(), e["tag"].as_str().unwrap().to_string()))
        .collect();
    assert_eq!(zs.len(), 4);
    assert!((zs[0].0 - 1.0).abs() < 1e-12 && zs[0].2 == "Sigma2");
    assert_eq!((zs[3].0, zs[3].1), (36.0, 2));
    let csv = fs::read_to_string(plot).unwrap();
    assert!(csv.starts_with("lambda,delta\n"));
    assert!(csv.lines().count() > 600);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "op.json", TWO_LEVEL);
    let a = run(&["forward", "--input", &input, "--window", "100"]);
    let b = run(&["forward", "--input", &input, "--window", "100"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // seventeen significant digits
    assert!(String::from_utf8_lossy(&a.stdout).contains("4.0000000000000000e0"));
}

#[test]
fn inverse_recovers_the_two_level_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "op.json", TWO_LEVEL);
    let spectra = dir.path().join("three.json").to_string_lossy().into_owned();
    let o = run(&["forward", "--three-spectra", "--order", "32", "--input", &input, "--output", &spectra]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let doc = json(&spectra);
    assert_eq!(doc["K"], 1);
    assert!(doc["base"]["entries"].is_array());

    let result = dir.path().join("inv.json").to_string_lossy().into_owned();
    let o = run(&["inverse", "--input", &spectra, "--output", &result]);
    assert!(o.status.success());
    let doc = json(&result);
    assert!((doc["alpha"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert!((doc["potential"]["c0"].as_f64().unwrap() - 0.6).abs() < 1e-6);
    let t = &doc["potential"]["terms"][0];
    assert!((t["c"].as_f64().unwrap() - 0.64).abs() < 1e-6);
    assert!((t["s"].as_f64().unwrap() - 0.48).abs() < 1e-6);
    assert!(doc["max_residual"].as_f64().unwrap() < 1e-6);
}

#[test]
fn synth_accepts_forward_data_and_rejects_mutants() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(
        dir.path(),
        "good.json",
        r#"{"active_levels": [0.0, 4.0], "mus": [0.4384471871911697, 4.561552812808830], "sigma1_levels": [4.0], "window": 40.0}"#,
    );
    let o = run(&["synth", "--input", &good]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["report"]["accepted"], true);
    assert!((doc["operator"]["alpha"].as_f64().unwrap() - 1.0).abs() < 1e-9);

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"active_levels": [0.0, 4.0], "mus": [1.0, 2.0], "sigma1_levels": [4.0], "window": 40.0}"#,
    );
    let o = run(&["synth", "--input", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["report"]["interlacing"], false);
}

#[test]
fn synth_reads_a_classified_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "op.json", CONSTANT);
    let spectrum = dir.path().join("s.json").to_string_lossy().into_owned();
    assert!(run(&["forward", "--input", &input, "--output", &spectrum]).status.success());
    let o = run(&["synth", "--input", &spectrum]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((doc["operator"]["potential"]["c0"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn validate_and_oracle_compare_pass() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "op.json", TWO_LEVEL);
    let o = run(&["validate", "--input", &input]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["secular_factorization"]["max_residual"].as_f64().unwrap() <= 1e-9);

    let o = run(&["oracle-compare", "--input", &input, "--window", "200", "--truncation", "20"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["max_deviation"].as_f64().unwrap() <= 1e-8);
    assert_eq!(doc["truncation"], 20);
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "op.json", r#"{"alpha": 1.0, "potential": {"c0": 0.0, "terms": [{"k": 0, "c": 1.0, "s": 0.0}], "K": 1}}"#);
    let o = run(&["forward", "--input", &input]);
    assert_eq!(o.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["error"].is_string());
    assert!(doc["detail"]["message"].is_string());

    let missing = dir.path().join("absent.json").to_string_lossy().into_owned();
    let o = run(&["forward", "--input", &missing]);
    assert_eq!(o.status.code(), Some(2));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["error"], "io");
}
