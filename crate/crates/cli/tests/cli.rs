use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;

fn ncc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncc")).args(args).output().expect("spawn ncc")
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = ncc(args);
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (v, code)
}

#[test]
fn info_sl2_grading() {
    let (v, code) = json(&["info", "--algebra", "sl:2", "--euler", "h1"]);
    assert_eq!(code, 0);
    assert_eq!(v["grading_dims"], serde_json::json!([1, 1, 1]));
    assert_eq!(v["euler"], true);
    assert_eq!(v["cone"]["causal_euler"]["h_interior"]["pass"], true);
    assert_eq!(v["config"]["tolerances"]["eq_tol"], 1e-9);
}

#[test]
fn info_sl3_and_so12() {
    let (v, _) = json(&["info", "--algebra", "sl:3", "--euler", "h1"]);
    assert_eq!(v["grading_dims"][1], 4);
    assert_eq!(v["subspaces"]["g_plus"], 2);
    let (v, _) = json(&["info", "--algebra", "so:1,2", "--euler", "boost"]);
    assert_eq!(v["subspaces"]["q"], 2);
    assert_eq!(v["subspaces"]["h"], 1);
}

#[test]
fn wedge_words() {
    let (v, code) = json(&["wedge", "--algebra", "sl:2", "z:0.5"]);
    assert_eq!(code, 0);
    assert_eq!(v["positivity_member"], true);
    assert_eq!(v["omega"]["found"], true);
    let (v, _) = json(&["wedge", "--algebra", "sl:2", "z:1.6"]);
    assert_eq!(v["positivity_member"], false);
    let (v, _) = json(&["wedge", "--algebra", "sl:2"]);
    assert_eq!(v["positivity_member"], true);
    assert_eq!(v["geodesic_orbit"], "causal_geodesic");
    assert_eq!(v["ball_status"], "bounded");
}

#[test]
fn wedge_invariant_under_flow() {
    let (a, _) = json(&["wedge", "--algebra", "sl:2", "z:0.9"]);
    let (b, _) = json(&["wedge", "--algebra", "sl:2", "h:-2.5,z:0.9"]);
    assert_eq!(a["positivity_member"], b["positivity_member"]);
}

#[test]
fn verify_desitter_agrees() {
    let (v, code) = json(&["verify", "desitter", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!(v["agree"], v["total"]);
    assert_eq!(v["config"]["seed"], 7);
}

#[test]
fn verify_atlas_rows() {
    let (v, code) = json(&["verify", "atlas"]);
    assert_eq!(code, 0);
    let checks = v["checks"].as_array().unwrap();
    let load = checks.iter().find(|c| c["id"] == "atlas.load").unwrap();
    assert_eq!(load["max_residual"], 20.0);
    assert_eq!(checks.iter().find(|c| c["id"] == "atlas.rank_relation").unwrap()["count"], 20);
}

#[test]
fn json_is_byte_identical_and_sorted() {
    let args = ["verify", "all", "--samples", "40", "--grid", "20", "--seed", "3"];
    let a = ncc(&args);
    let b = ncc(&args);
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let ids: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert_eq!(v["config"]["samples"], 40);
    assert_eq!(v["config"]["grid"], 20);
}

#[test]
fn sequential_matches_parallel() {
    let args = ["verify", "cones", "--samples", "30", "--grid", "15"];
    let par = ncc(&args);
    let mut seq_args = args.to_vec();
    seq_args.push("--sequential");
    let seq = ncc(&seq_args);
    assert_eq!(par.stdout, seq.stdout);
}

#[test]
fn verify_all_fast_at_100_samples() {
    let start = Instant::now();
    let (v, code) = json(&["verify", "all", "--samples", "100"]);
    assert_eq!(code, 0, "{v}");
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn exit_codes() {
    assert_eq!(ncc(&["verify", "bogus"]).status.code(), Some(2));
    assert_eq!(ncc(&["info", "--algebra", "sl:2", "--output", "xml"]).status.code(), Some(2));
    assert_eq!(ncc(&["info"]).status.code(), Some(2));
    assert_eq!(ncc(&["info", "--algebra", "sl:9x"]).status.code(), Some(2));
    assert_eq!(ncc(&["wedge", "--algebra", "sl:2", "q:1"]).status.code(), Some(2));
    assert_eq!(ncc(&["wedge", "--algebra", "sl:2", "z:abc"]).status.code(), Some(2));
    assert_eq!(ncc(&["info", "--algebra", "sl:3", "--euler", "h7"]).status.code(), Some(2));
    // a band this wide swallows the compression oracle's margin
    let out = ncc(&["verify", "jts", "--band", "0.4", "--samples", "50"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn table_output() {
    let out = ncc(&["verify", "atlas", "--output", "table"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("atlas.rank_relation") && l.contains("true")));
    let out = ncc(&["info", "--algebra", "so:1,2", "--output", "table"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.lines().any(|l| l.starts_with("subspaces.q ") && l.trim_end().ends_with('2')));
}
