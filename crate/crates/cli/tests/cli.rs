use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn theta_conf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theta-conf")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = theta_conf(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn betti(v: &Value) -> Vec<u64> {
    let mut b: Vec<u64> = v["betti"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    while b.last() == Some(&0) {
        b.pop();
    }
    b
}

#[test]
fn enumerate_counts() {
    assert_eq!(stdout(&["enumerate", "--n", "2", "--labels", "a,b"]).lines().count(), 4);
    assert_eq!(stdout(&["enumerate", "--n", "1", "--labels", "a,b,c"]).lines().count(), 6);
    assert_eq!(stdout(&["enumerate", "--n", "2", "--labels", "a,b,c"]).lines().count(), 24);
    assert_eq!(stdout(&["enumerate", "--n", "2", "--labels", "a,b"]).lines().next(), Some("a 0 b\t4"));
}

#[test]
fn enumerate_json_schema() {
    let v = json(&["enumerate", "--n", "2", "--labels", "a,b", "--format", "json"]);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1]["text"], "a 1 b");
    assert_eq!(rows[1]["degree"], 3);
    assert_eq!(rows[1]["ordering"]["word"], serde_json::json!([1]));
}

#[test]
fn hasse_diagrams() {
    let dot = stdout(&["hasse", "--n", "2", "--labels", "a,b"]);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("[label=").count(), 4);
    assert_eq!(dot.matches("->").count(), 4);
    assert!(dot.contains("[label=\"a 1 b\"]"));

    let single = stdout(&["hasse", "--n", "3", "--labels", "a"]);
    assert_eq!((single.matches("[label=").count(), single.matches("->").count()), (1, 0));

    let linear = json(&["hasse", "--n", "1", "--labels", "a,b,c", "--format", "json"]);
    assert_eq!(linear["nodes"].as_array().unwrap().len(), 6);
    assert!(linear["edges"].as_array().unwrap().is_empty());
}

#[test]
fn homology_runs() {
    let h = json(&["homology", "--n", "2", "--labels", "a,b"]);
    assert_eq!(betti(&h), vec![1, 1]);
    assert_eq!(h["torsion"], serde_json::json!([[], []]));
    assert_eq!(betti(&json(&["homology", "--n", "1", "--labels", "a,b,c"])), vec![6]);
    let h = json(&["homology", "--n", "2", "--labels", "a,b,c"]);
    assert_eq!(betti(&h), vec![1, 3, 2]);
    assert_eq!(h["euler"], 0);
}

#[test]
fn homology_csv_and_cap() {
    let csv = stdout(&["homology", "--n", "2", "--labels", "a,b", "--format", "csv"]);
    assert_eq!(csv.lines().next(), Some("degree,row,col,value"));
    // four edges, two endpoints each
    assert_eq!(csv.lines().count(), 1 + 8);
    let out = theta_conf(&["homology", "--n", "2", "--labels", "a,b,c", "--max-chains", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_point_files() {
    let dir = tempfile::tempdir().unwrap();
    let two = dir.path().join("two.txt");
    std::fs::write(&two, "a 0 0\nb 0 1\n").unwrap();
    assert_eq!(stdout(&["classify", "--n", "2", two.to_str().unwrap()]), "a 1 b\n");

    let one = dir.path().join("one.txt");
    std::fs::write(&one, "z 1/3 0.5\n").unwrap();
    assert_eq!(stdout(&["classify", "--n", "2", one.to_str().unwrap()]), "z\n");

    let dup = dir.path().join("dup.txt");
    std::fs::write(&dup, "a 1 2\nb 1 2\n").unwrap();
    let out = theta_conf(&["classify", "--n", "2", dup.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coincide"));
}

#[test]
fn classify_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_theta-conf"))
        .args(["classify", "--n", "2", "-", "--format", "json"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"a 1 0\nb 0 7\n").unwrap();
    let out = child.wait_with_output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["text"], "b 0 a");
    assert_eq!(v["ordering"]["labels"], serde_json::json!(["b", "a"]));
}

#[test]
fn verify_suites_pass() {
    let m = json(&["verify", "morphisms", "--max-edges", "6", "--n", "2"]);
    assert_eq!(m["passed"], true);
    assert!(m["details"]["pairs"].as_u64().unwrap() > 0);

    let b = json(&["verify", "theorem-b", "--n", "2", "--labels", "a,b,c"]);
    assert_eq!(b["passed"], true);
    let names: Vec<&str> = b["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"fullness") && names.contains(&"retraction") && names.contains(&"unit"));

    let p = json(&["verify", "poset", "--n", "3", "--labels", "a,b,c,d"]);
    assert_eq!(p["passed"], true);
    assert_eq!(p["details"]["orderings"], 648);

    assert_eq!(json(&["verify", "theorem-a", "--n", "2", "--labels", "a,b,c"])["passed"], true);
    assert_eq!(json(&["verify", "cells", "--n", "2", "--labels", "a,b", "--samples", "200"])["passed"], true);
}

#[test]
fn verify_text_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = theta_conf(&[
        "verify",
        "poset",
        "--n",
        "2",
        "--labels",
        "a,b",
        "--format",
        "text",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("suite poset: PASS"));
}

#[test]
fn errors_exit_nonzero() {
    assert_eq!(theta_conf(&["verify", "bogus"]).status.code(), Some(2));
    assert_eq!(theta_conf(&["enumerate", "--n", "2", "--labels", "a,a"]).status.code(), Some(2));
    assert_eq!(theta_conf(&["enumerate", "--n", "0", "--labels", "a"]).status.code(), Some(2));
    assert_eq!(theta_conf(&["verify", "poset", "--max-edges", "0"]).status.code(), Some(2));
    assert_eq!(theta_conf(&["classify", "--n", "2", "--format", "dot", "/nonexistent"]).status.code(), Some(2));
    assert_eq!(theta_conf(&["hasse", "--n", "2", "--labels", "a", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn thread_bound_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_theta-conf"))
            .args(["verify", "cells", "--n", "2", "--labels", "a,b,c", "--samples", "100"])
            .env("THETA_CONF_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout, "reports are deterministic");
    assert_eq!(run("zero").status.code(), Some(2));
}
