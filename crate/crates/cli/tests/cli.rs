use serde_json::{json, Value};
use std::path::Path;
use std::process::Command;

fn topos4(args: &[&str]) -> (i32, String) {
    topos4_env(args, &[])
}

fn topos4_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_topos4"));
    cmd.args(args).env_remove("TOPOS4_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out) = topos4(args);
    (code, serde_json::from_str(out.trim()).unwrap_or_else(|e| panic!("{e}: {out}")))
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn chain2() -> Value {
    json!({"worlds": 2, "relation": [[0, 0], [0, 1], [1, 1]], "labels": {"0": "a", "1": "b"}})
}

fn fork_file(dir: &Path) -> String {
    let (code, r) = report(&["construct", "fork", "--alpha", "2"]);
    assert_eq!(code, 0);
    write(dir, "fork.json", &r["details"]["frame"])
}

#[test]
fn fork_refutes_point_two() {
    let dir = tempfile::tempdir().unwrap();
    let fork = fork_file(dir.path());
    let (code, r) = report(&["validity", "--structure", &fork, "--formula", "<>[]p -> []<>p"]);
    assert_eq!(code, 1);
    assert_eq!(r["verdict"], "refuted");
    assert_eq!(r["counterexample"]["valuation"]["p"], json!([1]));
    assert_eq!(r["counterexample"]["label"], "r");
}

#[test]
fn transitivity_is_valid() {
    let dir = tempfile::tempdir().unwrap();
    let fork = fork_file(dir.path());
    let (code, r) = report(&["validity", "--structure", &fork, "--formula", "<><>p -> <>p"]);
    assert_eq!((code, r["verdict"].as_str()), (0, Some("valid")));
}

#[test]
fn letter_cap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let fork = fork_file(dir.path());
    let phi = "p1 & p2 & p3 & p4 & p5";
    let (code, r) = report(&["validity", "--structure", &fork, "--formula", phi]);
    assert_eq!((code, r["verdict"].as_str()), (3, Some("cap_exceeded")));
    let (code, _) = topos4_env(&["validity", "--structure", &fork, "--formula", phi], &[("TOPOS4_CAP", "5")]);
    assert_eq!(code, 1);
    let (code, _) =
        topos4_env(&["validity", "--structure", &fork, "--formula", phi, "--max-letters", "4"], &[("TOPOS4_CAP", "5")]);
    assert_eq!(code, 3);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let fork = fork_file(dir.path());
    assert_eq!(topos4(&["validity", "--structure", &fork, "--formula", "p ->"]).0, 2);
    assert_eq!(topos4(&["validity", "--structure", "/nonexistent.json", "--formula", "p"]).0, 2);
    assert_eq!(topos4(&["frobnicate"]).0, 2);
}

#[test]
fn interval_depth_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, r) = report(&["--out", out, "construct", "interval", "--depth", "3"]);
    assert_eq!((code, r["verdict"].as_str()), (0, Some("pass")));
    assert_eq!(r["details"]["report"]["max_length_exact"], json!(true));
    assert!(dir.path().join("interval.json").exists());
}

#[test]
fn fork_dot_has_four_nodes() {
    let (code, dot) = topos4(&["--format", "dot", "construct", "fork", "--alpha", "2"]);
    assert_eq!(code, 0);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("[label=").count(), 4);
}

#[test]
fn tcomb_chain_margin() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "chain2.json", &chain2());
    let (code, r) = report(&["construct", "tcomb", "--frame", &f, "--depth", "6"]);
    assert_eq!(code, 0);
    let rep = &r["details"]["report"];
    assert_eq!(rep["margin"], 3);
    assert_eq!(rep["onto"], true);
    assert!(rep["forth_violation"].is_null() && rep["back_violation"].is_null());
}

#[test]
fn gluing_two_forks_at_the_tip() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = json!({"worlds": 3, "relation": [[0, 0], [1, 1], [2, 2], [0, 1], [0, 2]]});
    let spec = json!({
        "parts": [f1, f1],
        "shared": {"worlds": 1, "relation": [[0, 0]]},
        "embeddings": [[1], [1]],
    });
    let spec = write(dir.path(), "spec.json", &spec);
    let out = dir.path().join("art");
    let (code, r) = report(&["--out", out.to_str().unwrap(), "glue", "--spec", &spec]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["points"], 5);
    assert_eq!(r["details"]["interior"]["verdict"], "pass");
    let glued = out.join("glued.json");
    let (code, r) = report(&["check", "s4", "--frame", glued.to_str().unwrap()]);
    assert_eq!((code, r["details"]["worlds"].as_u64()), (0, Some(5)));
}

#[test]
fn gluing_along_non_open_image_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f1 = json!({"worlds": 3, "relation": [[0, 0], [1, 1], [2, 2], [0, 1], [0, 2]]});
    let spec = json!({"parts": [f1, f1], "shared": {"worlds": 1, "relation": [[0, 0]]}, "embeddings": [[0], [0]]});
    let spec = write(dir.path(), "spec.json", &spec);
    assert_eq!(topos4(&["glue", "--spec", &spec]).0, 2);
}

#[test]
fn cgfp_on_two_chain() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "chain2.json", &chain2());
    let (code, r) = report(&["cgfp", "--structure", &f, "--formula", "p -> []p"]);
    assert_eq!(code, 0);
    assert_eq!(r["details"]["kept"], json!([0, 1]));
    let (code, r) = report(&[
        "cgfp", "--structure", &f, "--formula", "p -> []p", "--valuation", r#"{"p": [0]}"#, "--world", "0",
    ]);
    assert_eq!((code, r["details"]["enlarged"].as_bool()), (0, Some(false)));
}

#[test]
fn translation() {
    let (code, out) = topos4(&["--format", "text", "translate", "(p -> q) -> p"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "[]([]([]p -> []q) -> []p)");
    let (_, r) = report(&["translate", "p -> q"]);
    assert_eq!(r["details"]["translation"], "[]([]p -> []q)");
}

#[test]
fn convert_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fork = fork_file(dir.path());
    let (code, sp) = report(&["convert", "--input", &fork, "--to", "space"]);
    assert_eq!(code, 0);
    let sp = write(dir.path(), "space.json", &sp["details"]["structure"]);
    let (_, fr) = report(&["convert", "--input", &sp, "--to", "frame"]);
    let original: Value = serde_json::from_str(&std::fs::read_to_string(&fork).unwrap()).unwrap();
    assert_eq!(fr["details"]["structure"]["relation"], original["relation"]);
}

#[test]
fn checks() {
    let dir = tempfile::tempdir().unwrap();
    let fork = fork_file(dir.path());
    let chain = write(dir.path(), "chain2.json", &chain2());
    let bad = write(dir.path(), "bad.json", &json!({"worlds": 2, "relation": [[0, 1]]}));
    let (code, r) = report(&["check", "s4", "--frame", &bad]);
    assert_eq!((code, r["verdict"].as_str()), (1, Some("fail")));
    let space = write(dir.path(), "space.json", &json!({"carrier": 2, "opens": [0, 2, 3]}));
    assert_eq!(report(&["check", "s4", "--frame", &space]).0, 0);
    assert_eq!(report(&["check", "pmorphism", "--source", &fork, "--target", &chain, "--map", "0,1,1,1"]).0, 0);
    let (code, r) = report(&["check", "pmorphism", "--source", &fork, "--target", &chain, "--map", "1,1,0,0"]);
    assert_eq!(code, 1);
    assert!(!r["counterexample"].is_null());
    assert_eq!(report(&["check", "interior", "--source", &fork, "--target", &chain, "--map", "0,1,1,1"]).0, 0);
    assert_eq!(report(&["check", "descriptive", "--structure", &fork]).0, 0);
    assert_eq!(report(&["check", "connected", "--structure", &fork]).0, 0);
    assert_eq!(report(&["check", "well-connected", "--structure", &fork]).0, 0);
    let two = write(dir.path(), "two.json", &json!({"worlds": 2, "relation": [[0, 0], [1, 1]]}));
    let (code, r) = report(&["check", "connected", "--structure", &two]);
    assert_eq!(code, 1);
    assert!(!r["counterexample"]["clopen"].is_null());
}

#[test]
fn reports_hash_inputs() {
    let (_, a) = report(&["construct", "fork", "--alpha", "2"]);
    let (_, b) = report(&["construct", "fork", "--alpha", "2"]);
    let (_, c) = report(&["construct", "fork", "--alpha", "3"]);
    assert_eq!(a["inputs"], b["inputs"]);
    assert_ne!(a["inputs"], c["inputs"]);
    assert_eq!(a["inputs"].as_str().unwrap().len(), 64);
    for key in ["command", "verdict", "counterexample", "timing_ms", "details"] {
        assert!(a.get(key).is_some(), "{key}");
    }
}

#[test]
fn other_constructions() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "chain2.json", &chain2());
    let (code, r) = report(&["construct", "qstage", "--frame", &chain, "--stages", "2"]);
    assert_eq!((code, r["details"]["report"]["points"].as_u64()), (0, Some(21)));
    let (code, r) = report(&["construct", "cantor-lalpha", "--b", "2", "--depth", "4"]);
    assert_eq!((code, r["details"]["report"]["pass"].as_bool()), (0, Some(true)));
    let (code, r) = report(&["construct", "cluster", "--size", "3"]);
    assert_eq!((code, r["details"]["frame"]["worlds"].as_u64()), (0, Some(3)));
    let (code, r) = report(&["construct", "tree", "--depth", "2"]);
    assert_eq!((code, r["details"]["frame"]["worlds"].as_u64()), (0, Some(7)));
}
