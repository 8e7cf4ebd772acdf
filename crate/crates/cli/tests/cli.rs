//! End-to-end runs of the binary: exit codes, output files, round trips.

use std::path::Path;
use std::process::{Command, Output};

fn curvlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvlab")).args(args).current_dir(cwd).env_remove("CURVLAB_THREADS").output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(curvlab(&["--help"], d).status.code(), Some(0));
    assert_eq!(curvlab(&["verify", "--bogus"], d).status.code(), Some(2));
    assert_eq!(curvlab(&["verify", "--samples", "0"], d).status.code(), Some(2));
    assert_eq!(curvlab(&["analyze"], d).status.code(), Some(2));
    assert_eq!(curvlab(&["analyze", "--input", "missing.json"], d).status.code(), Some(2));
    assert_eq!(curvlab(&["oracle", "--samples", "20", "--algebra", "so5"], d).status.code(), Some(2));
    assert_eq!(curvlab(&["oracle", "--samples", "20"], d).status.code(), Some(0));
    assert_eq!(curvlab(&["verify", "--samples", "20", "--tol", "1e-20", "--out", "r.json"], d).status.code(), Some(1));
    let bad_threads = Command::new(env!("CARGO_BIN_EXE_curvlab")).args(["oracle", "--samples", "5"]).env("CURVLAB_THREADS", "zero").output().unwrap();
    assert_eq!(bad_threads.status.code(), Some(2));
}

#[test]
fn report_envelope_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = curvlab(&["oracle", "--samples", "10", "--seed", "4", "--out", "o.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v = json(&dir.path().join("o.json"));
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "oracle");
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["config"]["seed"], 4);
    assert_eq!(v["config"]["samples"], 10);
    assert!(v["config"].get("out").is_none());
    // no temporary files left behind by the atomic write
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, vec!["o.json"]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), r#"{"command":"oracle","seed":9,"samples":7}"#).unwrap();
    let out = curvlab(&["oracle", "--config", "c.json", "--samples", "5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["samples"], 5);
    std::fs::write(dir.path().join("bad.json"), r#"{"command":"oracle","seeed":9}"#).unwrap();
    assert_eq!(curvlab(&["oracle", "--config", "bad.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn catalog_then_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = curvlab(&["catalog", "--samples", "1", "--out", "cat"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let index = json(&dir.path().join("cat/index.json"));
    let entries = index["entries"].as_array().expect("entries");
    assert!(!entries.is_empty());
    for e in entries {
        let name = e["name"].as_str().unwrap();
        let file = format!("cat/{name}.json");
        let out = curvlab(&["analyze", "--input", &file, "--samples", "100", "--out", "a.json"], dir.path());
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let a = json(&dir.path().join("a.json"));
        assert_eq!(a["command"], "analyze");
        assert_eq!(a["classification"]["kind"], e["expected"], "{name}");
    }
}

#[test]
fn csv_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = curvlab(&["verify", "--samples", "20", "--format", "csv"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("suite"));
    assert_eq!(lines.count(), 12);
}
