use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_qudit-qaoa")).args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&run(args)).unwrap()
}

fn generate(dir: &Path) -> String {
    run(&["generate", "--n", "9", "--d", "2", "--count", "2", "--seed", "3", "--out", dir.to_str().unwrap()]);
    dir.join("n9-d2-00.json").to_str().unwrap().to_owned()
}

#[test]
fn generate_writes_graphs_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path());
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["graphs"].as_array().unwrap().len(), 2);
    let first = std::fs::read_to_string(&a).unwrap();

    // same seed, same files
    let again = tempfile::tempdir().unwrap();
    let b = generate(again.path());
    assert_eq!(first, std::fs::read_to_string(b).unwrap());
}

#[test]
fn rqaoa_solves_small_planted_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path());
    let v = json(&["rqaoa", "--graph", &g, "--k", "3", "--cutoff", "4"]);
    assert_eq!(v["coloring"].as_array().unwrap().len(), 9);
    assert!(v["ratio"].as_f64().unwrap() >= 2.0 / 3.0);
    assert_eq!(v["trail"].as_array().unwrap().len(), 5);
}

#[test]
fn oracle_agrees_with_engine_and_optimize() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path());
    let v = json(&["oracle", "--graph", &g, "--k", "3", "--angles=0.3,-0.1,0.2,0.7"]);
    assert!(v["difference"].as_f64().unwrap() < 1e-9);

    let out = dir.path().join("opt.json");
    run(&["optimize", "--hamiltonian", &g, "--k", "3", "--out", out.to_str().unwrap()]);
    let opt: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    let exact = json(&["oracle", "--graph", &g, "--k", "3"]);
    assert!((opt["energy"].as_f64().unwrap() - exact["energy"].as_f64().unwrap()).abs() < 1e-9);
}

#[test]
fn hamiltonian_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    std::fs::write(
        &path,
        r#"{"k": 2, "n": 3, "couplings": [
            {"i": 0, "j": 1, "J": [0.0, 1.0]},
            {"i": 1, "j": 2, "J": [0.0, 1.0]}]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["rqaoa", "--graph", p, "--cutoff", "1"]);
    assert_eq!(v["value"].as_f64().unwrap(), 2.0);
    assert!(v["ratio"].is_null());
}

#[test]
fn newman_and_experiment_run() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path());
    let v = json(&["newman", "--graph", &g, "--samples", "10", "--seed", "1"]);
    assert_eq!(v["values"].as_array().unwrap().len(), 10);

    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n_list": [6], "d_list": [2], "graphs_per_cell": 1, "newman_samples": 4, "random_draws": 20, "cutoff": 3}"#).unwrap();
    let out = dir.path().join("exp");
    run(&["experiment", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(2).unwrap().ends_with(",ok"));
}

#[test]
fn bad_angle_count_fails() {
    let dir = tempfile::tempdir().unwrap();
    let g = generate(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_qudit-qaoa"))
        .args(["oracle", "--graph", &g, "--k", "3", "--angles=0.1,0.2"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
