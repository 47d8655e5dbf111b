use std::path::Path;
use std::process::{Command, Output};

fn hspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hspec")).args(args).env_remove("HSPEC_WORKERS").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TWO: &str = "%%MatrixMarket matrix array real general\n2 2\n1\n3\n2\n4\n";
const SWAP: &str = "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 4\n1 2 3\n2 1 2\n2 2 1\n";

#[test]
fn rho_prints_certified_value() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.mtx", TWO);
    let out = hspec(&["rho", "--functional", "r", "--matrix", &two]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("r = 5.372281323"), "{text}");
    let width: f64 = text.lines().find_map(|l| l.strip_prefix("width = ")).unwrap().parse().unwrap();
    assert!(width <= 1e-9);

    let out = hspec(&["rho", "--functional", "maxentry", "--matrix", &two]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("maxentry = 4.000000000"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let two = write(dir.path(), "two.mtx", TWO);
    assert_eq!(hspec(&["refine", "--matrix", &two, "--alpha", "1.5", "--depth", "2"]).status.code(), Some(2));
    assert_eq!(hspec(&["rho", "--functional", "bogus", "--matrix", &two]).status.code(), Some(2));
    assert_eq!(hspec(&["check", "--law", "L99"]).status.code(), Some(2));
    assert_eq!(hspec(&["frobnicate"]).status.code(), Some(2));
    let neg = write(dir.path(), "neg.mtx", "%%MatrixMarket matrix array real general\n1 1\n-1\n");
    let out = hspec(&["rho", "--functional", "r", "--matrix", &neg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("negative"));
}

#[test]
fn check_small_campaign() {
    assert_eq!(hspec(&["check", "--law", "L17", "--trials", "5", "--seed", "1"]).status.code(), Some(0));
    let out = hspec(&["check", "--law", "all", "--trials", "1", "--functional", "w", "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("L01") && !text.contains("L08"));
}

#[test]
fn check_json_is_stable_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let base = ["check", "--law", "L11", "--trials", "20", "--seed", "4", "--max-dim", "5"];
    let run = |path: &Path, w: &str| {
        let mut args = base.to_vec();
        args.extend(["--workers", w, "--json", path.to_str().unwrap()]);
        assert_eq!(hspec(&args).status.code(), Some(0));
    };
    run(&a, "1");
    run(&b, "3");
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let out = Command::new(env!("CARGO_BIN_EXE_hspec")).args(base).env("HSPEC_WORKERS", "0").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.mtx", TWO);
    write(dir.path(), "b.mtx", SWAP);
    let spec =
        write(dir.path(), "spec.json", r#"{"matrices": ["a.mtx", "b.mtx"], "weights": [0.5, 0.5], "functional": "r"}"#);
    let json = dir.path().join("out.json");
    let out = hspec(&["eval", "--law", "L01", "--input", &spec, "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["verdict"], "pass");
    let vals = v["values"].as_array().unwrap();
    assert!((vals[0].as_f64().unwrap() - (2.0 + 6f64.sqrt())).abs() < 1e-9);
    assert!((vals[1].as_f64().unwrap() - (5.0 + 33f64.sqrt()) / 2.0).abs() < 1e-9);

    let out = hspec(&["eval", "--law", "L01", "--input", &spec, "--functional", "w"]);
    assert_eq!(out.status.code(), Some(0));
    let out = hspec(&["eval", "--law", "L17", "--input", &spec]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn refine_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let cyc = write(dir.path(), "c.mtx", "%%MatrixMarket matrix coordinate real general\n3 3 3\n1 2 1\n2 3 1\n3 1 1\n");
    let out = hspec(&["refine", "--matrix", &cyc, "--alpha", "0.5", "--depth", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("rho_3 = 0.000000000000e0"), "{text}");
    assert!(text.contains("cap = 1.000000000000e0"), "{text}");

    let two = write(dir.path(), "two.mtx", TWO);
    let json = dir.path().join("p.json");
    let out =
        hspec(&["profile", "--matrix", &two, "--functional", "op2", "--grid", "5", "--json", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["grid"].as_array().unwrap().len(), 5);
    assert_eq!(hspec(&["profile", "--matrix", &two, "--grid", "4"]).status.code(), Some(2));
}

#[test]
fn laws_lists_catalog() {
    let out = hspec(&["laws"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("L01") && text.contains("L44"));
}
