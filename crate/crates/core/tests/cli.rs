//! The `distsec` binary end to end.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn distsec(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distsec"))
        .current_dir(dir)
        .args(args)
        .env_remove("DISTSEC_CAP_STATES")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = distsec(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn status(dir: &Path, args: &[&str]) -> i32 {
    distsec(dir, args).status.code().unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const SYSTEM: &str = r#"{
    "version": 1,
    "sources": [{"values": [1, 2, 3, 4]}, {"values": [1, 2, 3, 4]}],
    "codes": ["code.json", {"encoder": "greedy", "k": 1}],
    "function": {"form": "sum", "components": "values"}
}"#;

#[test]
fn encode_writes_the_paired_code() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["encode", "--alg", "greedy", "--values", "1,2,3,4", "--k", "1", "-o", "code.json"]);
    let code: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("code.json")).unwrap()).unwrap();
    assert_eq!(code, serde_json::json!({"m": 4, "k": 1, "r": 4, "assignment": [[3, 2, 1, 0], [0, 1, 2, 3]]}));
}

#[test]
fn analyze_reports_perfect_security() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["encode", "--values", "1,2,3,4", "--k", "1", "-o", "code.json"]);
    let csv = ok(dir.path(), &["analyze", "--code", "code.json", "--values", "1,2,3,4"]);
    let t = rows(&csv);
    assert_eq!(t[0][3..6], ["d_max", "d_ach", "delta"]);
    assert_eq!(t[1][3..6], ["1.25", "1.25", "0"]);
    assert_eq!(t[1][9..], ["true", "true", "true"]);
}

#[test]
fn sweep_table() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["sweep", "--values", "9,5,2,1", "--k", "0..5", "--alg", "greedy,exchange", "-o", "sweep.csv"]);
    let t = rows(&fs::read_to_string(dir.path().join("sweep.csv")).unwrap());
    assert_eq!(
        t[0].join(","),
        "alphabet_id,m,k,alg,seed,d_max,d_ach,delta,bound1,bound2,bound1_ok,bound2_ok,perfectly_secure"
    );
    assert_eq!(t.len(), 13);
    let greedy: Vec<f64> = t[1..].iter().filter(|r| r[3] == "greedy").map(|r| r[7].parse().unwrap()).collect();
    assert_eq!(greedy.len(), 6);
    assert!(greedy.windows(2).all(|w| w[1] <= w[0]), "{greedy:?}");
    assert!(t[1..].iter().all(|r| r[10] == "true" && r[11] == "true"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let runs = |tag: &str, jobs: &str| {
        let sweep = format!("sweep-{tag}.csv");
        let sim = format!("sim-{tag}.csv");
        ok(d, &["sweep", "--range", "1..12", "--k", "0..4", "--alg", "exchange,greedy", "--seeds", "1..3", "--jobs", jobs, "-o", &sweep]);
        ok(d, &["encode", "--range", "1..12", "--alg", "exchange", "--k", "2", "--seed", "9", "-o", "c.json"]);
        ok(d, &["simulate", "--code", "c.json", "--range", "1..12", "--trials", "40000", "--seeds", "4,5", "--jobs", jobs, "-o", &sim]);
        (fs::read(d.join(sweep)).unwrap(), fs::read(d.join(sim)).unwrap())
    };
    let first = runs("a", "1");
    assert_eq!(first, runs("b", "1"));
    assert_eq!(first, runs("c", "4"));
}

#[test]
fn compose_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("system.json"), SYSTEM).unwrap();
    ok(d, &["encode", "--alg", "identity", "--values", "1,2,3,4", "--k", "0", "-o", "code.json"]);
    let t = rows(&ok(d, &["compose", "--system", "system.json"]));
    assert_eq!(t[1][3..6], ["2.5", "1.25", "1.25"]);
    assert_eq!(t[1][6..], ["false", "false"]);
    let w = rows(&ok(d, &["compose", "--system", "system.json", "--witness", "0"]));
    assert_eq!(w[0].join(","), "form,source,observation,conditional_mean,mean,joint_delta");
    assert_eq!(w[1][3..], ["6.5", "5", "1.25"]);
    assert_eq!(status(d, &["compose", "--system", "system.json", "--witness", "1"]), 6);

    let sim = rows(&ok(d, &["simulate", "--system", "system.json", "--trials", "20000", "--seed", "3"]));
    assert_eq!(sim[0].join(","), "trials,seed,analytic_dach,empirical_dach,stderr");
    assert_eq!(sim[1][..3], ["20000", "3", "1.25"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(status(d, &["encode", "--nonsense"]), 2);
    assert_eq!(status(d, &["sweep"]), 2);
    assert_eq!(status(d, &["encode", "--values", "1,x"]), 3);
    fs::write(d.join("bad.json"), "{").unwrap();
    assert_eq!(status(d, &["analyze", "--code", "bad.json", "--values", "1"]), 3);
    assert_eq!(status(d, &["search", "--range", "1..9"]), 4);
    assert_eq!(status(d, &["analyze", "--code", "missing.json", "--values", "1"]), 5);

    fs::write(d.join("system.json"), SYSTEM).unwrap();
    ok(d, &["encode", "--values", "1,2,3,4", "--k", "1", "-o", "code.json"]);
    let capped = Command::new(env!("CARGO_BIN_EXE_distsec"))
        .current_dir(d)
        .args(["compose", "--system", "system.json"])
        .env("DISTSEC_CAP_STATES", "10")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(4));
    assert!(!capped.stderr.is_empty());
}

#[test]
fn search_reports_structure() {
    let dir = tempfile::tempdir().unwrap();
    let doc: serde_json::Value = serde_json::from_str(&ok(dir.path(), &["search", "--values", "9,5,2,1", "--k", "1"])).unwrap();
    assert_eq!(doc["best_delta_exact"], "9/16");
    assert_eq!(doc["greedy_gap"], 0.0);
    assert_eq!(doc["exhaustive"], true);
    assert_eq!(doc["structure"]["at_most_one_small_bin"], true);
}
