use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use dgcell::cli::Report;
use dgcell::examples;
use dgcell::input::parse_file;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgcell")).args(args).output().expect("binary runs")
}

fn run_json(file: &str, args: &[&str]) -> (i32, Value) {
    let path = data(file);
    let mut all = vec![path.to_str().unwrap()];
    all.extend_from_slice(args);
    all.extend_from_slice(&["--format", "json"]);
    let out = run(&all);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn cell_ids(report: &Value, kind: &str, side: &str) -> Vec<String> {
    let rel = report["result"]["relations"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["kind"] == kind && r["side"] == side)
        .unwrap();
    let mut ids: Vec<String> = rel["cells"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap().to_string()).collect();
    ids.sort();
    ids
}

#[test]
fn sample_inputs_validate() {
    for f in [
        "dual_numbers.toml",
        "dual_numbers_acyclic.toml",
        "a2.toml",
        "q_times_q.toml",
        "matrix2.toml",
        "comm_x2.toml",
        "comm_x2_minus_1.toml",
        "comm_x2_plus_1.toml",
    ] {
        let (code, v) = run_json(f, &["validate"]);
        assert_eq!(code, 0, "{f}");
        assert_eq!(v["result"]["valid"], true, "{f}");
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["algebra"]["fingerprint"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn sample_inputs_compile_to_the_builtin_algebras() {
    let cases = [
        ("dual_numbers.toml", examples::dual_numbers(0, false)),
        ("dual_numbers_acyclic.toml", examples::dual_numbers(-1, true)),
        ("a2.toml", examples::a2()),
        ("q_times_q.toml", examples::q_times_q()),
        ("matrix2.toml", examples::matrix2()),
    ];
    for (f, a) in cases {
        let (input, _) = parse_file(&data(f)).unwrap();
        assert_eq!(input.algebra.dim(), a.dim(), "{f}");
        assert_eq!(input.algebra.degrees, a.degrees, "{f}");
        assert_eq!(input.algebra.idempotents.len(), a.idempotents.len(), "{f}");
    }
}

#[test]
fn cells_on_a2() {
    let (code, v) = run_json("a2.toml", &["cells"]);
    assert_eq!(code, 0);
    assert_eq!(cell_ids(&v, "weak", "J"), ["J0", "J1"]);
    assert_eq!(cell_ids(&v, "weak", "L"), ["J1", "L0:e1", "L0:e2"]);
    assert_eq!(cell_ids(&v, "strong", "L"), ["J1", "L0:e1", "L0:e2"]);
    assert!(v["consistency_flags"].as_array().unwrap().is_empty());
}

#[test]
fn weak_only_skips_bounded_searches() {
    let (code, v) = run_json("a2.toml", &["cells", "--weak-only"]);
    assert_eq!(code, 0);
    assert!(v["result"]["relations"].as_array().unwrap().iter().all(|r| r["kind"] == "weak"));
}

#[test]
fn order_query_on_a2() {
    let (code, v) = run_json("a2.toml", &["order", "--kind", "weak", "--side", "L", "--lhs", "P:e1,e1", "--rhs", "P:e1,e2"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["result"]["verdict"], "false");
    let (_, v) = run_json("a2.toml", &["order", "--kind", "strong", "--side", "L", "--lhs", "P:e1,e1", "--rhs", "P:e1,e2"]);
    assert_eq!(v["result"]["result"]["verdict"], "false-at-depth");
    let (_, v) = run_json("a2.toml", &["order", "--kind", "tri", "--side", "J", "--lhs", "Id:1", "--rhs", "P:e1,e2", "--depth", "2"]);
    assert_eq!(v["result"]["result"]["verdict"], "true");
}

#[test]
fn verify_on_the_acyclic_algebra() {
    let (code, v) = run_json("dual_numbers_acyclic.toml", &["verify-paper"]);
    assert_eq!(code, 0);
    let reps: Vec<&Value> = v["result"]["two_sided"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|t| t["left_cells"].as_array().unwrap())
        .map(|l| &l["rep"])
        .collect();
    assert_eq!(reps.len(), 2);
    assert!(reps.iter().all(|r| r["acyclic"] == true));
    assert!(v["result"]["assertions"].as_array().unwrap().iter().all(|a| a["passed"] == true));
}

#[test]
fn maxspec_and_cellrep() {
    let (code, v) = run_json("dual_numbers.toml", &["maxspec", "--cell", "L0:e"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["ideals"].as_array().unwrap().len(), 1);
    let (code, v) = run_json("q_times_q.toml", &["cellrep", "--cell", "J0"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["natural"], true);
    let (code, _) = run_json("q_times_q.toml", &["cellrep", "--cell", "J0", "--ideal", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn commutative_mode() {
    for (f, n) in [("comm_x2_minus_1.toml", 2), ("comm_x2_plus_1.toml", 1), ("comm_x2.toml", 1)] {
        let (code, v) = run_json(f, &["maxspec", "--cell", "R"]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["report"]["ideals"].as_array().unwrap().len(), n, "{f}");
    }
    let (code, v) = run_json("comm_x2.toml", &["cellrep", "--cell", "R", "--ideal", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["quotient_dim"], 1);
    let (code, _) = run_json("comm_x2.toml", &["order", "--kind", "weak", "--side", "L", "--lhs", "a", "--rhs", "b"]);
    assert_eq!(code, 2);
}

#[test]
fn json_is_deterministic_and_round_trips() {
    let a = run(&[data("a2.toml").to_str().unwrap(), "verify", "--format", "json", "--seed", "7"]);
    let b = run(&[data("a2.toml").to_str().unwrap(), "verify", "--format", "json", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let r: Report = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r.seed, 7);
    let again: Report = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(r, again);
}

#[test]
fn input_errors_exit_with_two() {
    let out = run(&[data("a2.toml").to_str().unwrap(), "maxspec", "--cell", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
    let out = run(&[data("a2.toml").to_str().unwrap(), "order", "--kind", "weak", "--side", "L", "--lhs", "Q:x", "--rhs", "Id:1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["/nonexistent/input.toml", "validate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mutated_inputs_fail_with_itemized_violations() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("matrix2.toml")).unwrap().replace("\"E12*E21\" = \"E11\"", "\"E12*E21\" = \"2*E11\"");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = run(&[path.to_str().unwrap(), "validate", "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["valid"], false);
    assert!(!v["result"]["violations"].as_array().unwrap().is_empty());

    let infinite = dir.path().join("loop.toml");
    std::fs::write(&infinite, "form = \"quiver\"\nvertices = [\"\"]\n[[arrows]]\nname = \"x\"\nsource = \"\"\ntarget = \"\"\n").unwrap();
    let out = run(&[infinite.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("infinite") || String::from_utf8_lossy(&out.stderr).contains("truncation"));
}

#[test]
fn text_output_is_readable() {
    let out = run(&[data("q_times_q.toml").to_str().unwrap(), "cells", "--weak-only"]);
    assert_eq!(out.status.code(), Some(0));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("cells (algebra "));
    assert!(s.contains("consistency: ok"));
}
