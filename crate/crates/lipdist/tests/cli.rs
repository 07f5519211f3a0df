use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lipdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipdist")).args(args).output().expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("report written")).expect("valid JSON")
}

fn small(out: &Path) -> Vec<String> {
    ["--n", "1", "--jgrid", "10", "--jrange", "4..8", "--out", out.to_str().unwrap()]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn run(cmd: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec![cmd.into()];
    args.extend(small(out));
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    lipdist(&refs)
}

#[test]
fn constant_seminorms() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("seminorms", dir.path(), &["--spec", "trig k=0 a=2", "--s", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&dir.path().join("seminorms.json"));
    let norms = &rep["result"]["norms"];
    for key in ["holder", "zygmund", "wavelet_lip", "wavelet_jbmo", "direct_jbmo", "poisson"] {
        let v = norms[key].as_f64().unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{key} = {v}");
    }
    let csv = std::fs::read_to_string(dir.path().join("seminorms.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("seminorms", dir.path(), &["--spec", "cosine k=1"]).status.code(), Some(2));
    assert_eq!(run("seminorms", dir.path(), &["--spec", "xlogx", "--s", "1.5"]).status.code(), Some(2));
    assert_eq!(run("distance", dir.path(), &[]).status.code(), Some(2));
    assert_eq!(lipdist(&["frobnicate"]).status.code(), Some(2));
    let o = run("sets", dir.path(), &["--spec", "xlogx", "--eps", "1", "--method", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    let o = lipdist(&["distance", "--spec", "xlogx", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sets_huge_eps_is_empty_and_zero_is_full() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("sets", dir.path(), &["--spec", "weierstrass s=1 levels=8", "--eps", "1e9", "--method", "wavelet"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&dir.path().join("sets_wavelet.json"));
    assert_eq!(rep["result"]["cells"], 0);
    assert!(rep["result"]["carleson"]["M_J"].as_array().unwrap().iter().all(|v| v == 0.0));
    let set = read_json(&dir.path().join("set_wavelet.json"));
    assert_eq!(set["J_max"], 8);
    assert!(dir.path().join("coefficients.json").exists());
    assert!(dir.path().join("field_wavelet.csv").exists());

    let o = run("sets", dir.path(), &["--spec", "weierstrass s=1 levels=8", "--eps", "0", "--method", "secdiff"]);
    assert!(o.status.success());
    let rep = read_json(&dir.path().join("sets_secdiff.json"));
    assert_eq!(rep["result"]["cells"], 511);
    assert_eq!(rep["result"]["carleson"]["diverging"], true);
}

#[test]
fn distance_reports_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("distance", dir.path(), &["--spec", "wavelet-atom l=1 j=2 k=1", "--s", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.path().join("distance.json");
    let mut first = read_json(&path);
    let est = first["result"]["estimates"].as_array().unwrap();
    assert_eq!(est.len(), 3);
    for e in est {
        assert_eq!(e["epsilon_star"], 0.0);
        assert!(e["slope_trace"].as_array().unwrap().len() == 20);
    }
    assert!(first["result"]["comparisons"]["ratios"].as_array().unwrap().iter().all(|r| r["ratio"] == 1.0));
    assert_eq!(first["config"]["jgrid"], 10);

    run("distance", dir.path(), &["--spec", "wavelet-atom l=1 j=2 k=1", "--s", "0.5"]);
    let mut second = read_json(&path);
    first["timestamp"] = Value::Null;
    second["timestamp"] = Value::Null;
    assert_eq!(first, second);
    assert_eq!(first["input_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, format!("jgrid = 9\njrange = 3..7\ns = 0.5\nout = {}\n", dir.path().display())).unwrap();
    let o = lipdist(&["inclusion", "--config", cfg.to_str().unwrap(), "--spec", "weierstrass s=1 levels=7", "--s", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&dir.path().join("inclusion_wavelet_secdiff.json"));
    assert_eq!(rep["config"]["jgrid"], 9);
    assert_eq!(rep["config"]["s"], 1.0);
    assert_eq!(rep["result"]["grid"].as_array().unwrap().len(), 16);
}
