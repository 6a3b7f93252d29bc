//! End-to-end runs of the `balmaps` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn balmaps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_balmaps")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

/// Emits the real graphs of degree `d` into `dir` and returns the JSON paths.
fn emit_real(dir: &Path, d: usize) -> Vec<String> {
    let out = stdout_json(&balmaps(&["enumerate-real", "--degree", &d.to_string(), "--emit-dir", dir.to_str().unwrap()]));
    out["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap().to_string()).filter(|f| f.ends_with(".json")).collect()
}

#[test]
fn catalan_prints_the_count() {
    let out = balmaps(&["catalan", "--degree", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "2");
    assert_eq!(stdout_json(&balmaps(&["catalan", "--degree", "8"])), Value::from(429));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(balmaps(&["catalan"]).status.code(), Some(2));
    assert_eq!(balmaps(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn non_bipartite_dual_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nonsense.json");
    // one vertex, two edges interleaved: a torus with a single face
    fs::write(&path, r#"{"vertices":1,"sigma":[1,2,3,0],"alpha":[2,3,0,1],"vertex_of":[0,0,0,0]}"#).unwrap();
    let out = balmaps(&["balance", "check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "NotBipartiteDual");
    let v = stdout_json(&balmaps(&["validate", path.to_str().unwrap()]));
    assert_eq!((v["genus"].as_u64(), v["two_colorable"].as_bool()), (Some(1), Some(false)));
}

#[test]
fn invalid_rotation_system_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"{"vertices":1,"sigma":[1,2,0],"alpha":[1,0,2],"vertex_of":[0,0,0]}"#).unwrap();
    let out = balmaps(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "FixedPointInAlpha");
    let missing = balmaps(&["validate", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(stderr_json(&missing)["error"], "Io");
}

#[test]
fn enumerate_real_verifies_and_emits() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout_json(&balmaps(&["enumerate-real", "--degree", "4", "--verify", "--emit-dir", dir.path().to_str().unwrap()]));
    assert_eq!(out["summary"], "5/5 locally balanced");
    assert_eq!(out["graphs"], 5);
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.iter().filter(|n| n.to_string_lossy().ends_with(".json")).count(), 5);
    assert_eq!(names.iter().filter(|n| n.to_string_lossy().ends_with(".svg")).count(), 5);
}

#[test]
fn real_graph_passes_balance_and_monodromy() {
    let dir = tempfile::tempdir().unwrap();
    for path in emit_real(dir.path(), 3) {
        let b = stdout_json(&balmaps(&["balance", "check", &path, "--witness"]));
        assert_eq!(b["balanced"], true);
        assert_eq!(b["type"]["d"], 3);
        let t = stdout_json(&balmaps(&["balance", "check", &path, "--thurston"]));
        assert_eq!(t["locally_balanced"], true);
        let m = stdout_json(&balmaps(&["monodromy", &path]));
        assert_eq!(m["product_is_identity"], true);
        assert_eq!(m["transitive"], true);
        assert_eq!(m["passport_genus"], 0);
        assert_eq!(m["permutations"].as_array().unwrap().len(), 4);
        let l = stdout_json(&balmaps(&["label", &path]));
        assert_eq!(l["m"], 4);
        let e = stdout_json(&balmaps(&["enrich", &path, "--all-matchings"]));
        assert_eq!(e["dots_a"], e["dots_b"]);
    }
}

#[test]
fn exported_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = &emit_real(dir.path(), 4)[2];
    let copy = dir.path().join("copy.json");
    stdout_json(&balmaps(&["export", path, "--format", "json", "--out", copy.to_str().unwrap()]));
    let a: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&fs::read_to_string(&copy).unwrap()).unwrap();
    assert_eq!(a, b);
    let dot = balmaps(&["export", path, "--format", "dot"]);
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("digraph"));
    let svg = balmaps(&["export", path, "--format", "svg"]);
    assert!(String::from_utf8_lossy(&svg.stdout).starts_with("<svg"));
}

#[test]
fn contraction_and_expansion_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = &emit_real(dir.path(), 4)[0];
    let ops = stdout_json(&balmaps(&["op", "list", path]));
    let dart = ops
        .as_array()
        .unwrap()
        .iter()
        .find_map(|op| op.get("Contract").map(|c| c["dart"].as_u64().unwrap()))
        .expect("a contractible edge");
    let c = stdout_json(&balmaps(&["op", "contract", path, "--dart", &dart.to_string()]));
    assert_eq!(c["type"]["m"], 5);
    let contracted = dir.path().join("contracted.json");
    fs::write(&contracted, c["map"].to_string()).unwrap();
    let part: Vec<String> = c["part"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
    let e = stdout_json(&balmaps(&[
        "op",
        "expand",
        contracted.to_str().unwrap(),
        "--vertex",
        &c["vertex"].to_string(),
        "--part",
        &part.join(","),
    ]));
    assert_eq!(e["type"]["m"], 6);
}

#[test]
fn inapplicable_operation_names_the_reason() {
    let dir = tempfile::tempdir().unwrap();
    let path = &emit_real(dir.path(), 3)[0];
    let out = balmaps(&["op", "contract", path, "--dart", "999"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "NoSuchDart");
    let out = balmaps(&["op", "insert", path]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reachability_reaches_every_balanced_candidate() {
    let r = stdout_json(&balmaps(&["op", "reachability", "--from", "generic", "--degree", "4"]));
    assert_eq!(r["reached"], r["balanced"]);
    assert_eq!(r["missing"].as_array().unwrap().len(), 0);
}

#[test]
fn cubic_trace_agrees_with_classification() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("trace.svg");
    let t = stdout_json(&balmaps(&["cubic", "trace", "--c", "3", "--branch", "alpha", "--grid", "400", "--svg", svg.to_str().unwrap()]));
    assert_eq!(t["agrees_with_model"], true);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let l = stdout_json(&balmaps(&["cubic", "trace", "--c", "-2", "--branch", "β", "--method", "lift"]));
    assert_eq!(l["agrees_with_model"], true);
    let c = stdout_json(&balmaps(&["cubic", "classify", "--branch", "alpha", "--interval", "(-inf,0)"]));
    assert_eq!(c["edges"].as_array().unwrap().len(), 8);
    let complex = stdout_json(&balmaps(&["cubic", "trace", "--c", "0.3", "--c-im", "0.8", "--branch", "beta", "--method", "lift"]));
    assert_eq!(complex["edges"].as_array().unwrap().len(), 8);
    assert_eq!(balmaps(&["cubic", "trace", "--c", "0.3", "--c-im", "0.8", "--branch", "beta"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = &emit_real(dir.path(), 4)[1];
    let a = balmaps(&["monodromy", path]).stdout;
    let b = balmaps(&["monodromy", path]).stdout;
    assert_eq!(a, b);
}
