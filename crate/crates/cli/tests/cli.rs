use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn perc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perc")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn prob_single_edge() {
    let out = perc(&["prob", "--graph", &fixture("single_edge.json"), "--event", "conn 0 b"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["probability"], "1/2");
}

#[test]
fn prob_float_mode_is_labelled() {
    let out = perc(&["--mode", "float", "prob", "--graph", &fixture("triangle.json"), "--event", "conn 0 b"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mode"], "float");
    let p: f64 = v["probability"].as_str().unwrap().parse().unwrap();
    assert!((p - 0.625).abs() < 1e-12, "{v}");
}

#[test]
fn prob_event_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ev.json");
    std::fs::write(&path, r#"{"conn": [["0"], ["b"]]}"#).unwrap();
    let out = perc(&["prob", "--graph", &fixture("triangle.json"), "--event-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["probability"], "5/8");
}

#[test]
fn check_exit_codes_follow_the_margin() {
    let out = perc(&["check", "--conjecture", "postfkg", "--graph", &fixture("directed_cx.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["margin"], "-1/32");
    let out = perc(&["check", "--conjecture", "prefkga", "--graph", &fixture("a2_instance.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!json(&out)["margin"].as_str().unwrap().starts_with('-'));
    let out = perc(&["check", "--conjecture", "mcp", "--k", "3", "--graph", &fixture("a2_instance.json")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn input_errors_exit_2() {
    let out = perc(&["prob", "--graph", &fixture("single_edge.json"), "--event", "conn 0 nowhere"]);
    assert_eq!(out.status.code(), Some(2));
    let out = perc(&["prob", "--graph", "/nonexistent.json", "--event", "conn 0 b"]);
    assert_eq!(out.status.code(), Some(2));
    let out = perc(&["check", "--conjecture", "nonsense", "--graph", &fixture("single_edge.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = perc(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn resource_limit_exits_3() {
    let out = perc(&["--max-edges", "2", "prob", "--graph", &fixture("triangle.json"), "--event", "conn 0 b"]);
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_perc"))
        .env("PERC_MAX_EDGES", "2")
        .args(["prob", "--graph", &fixture("triangle.json"), "--event", "conn 0 b"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn coeffs_and_lemmas_run() {
    let out = perc(&["coeffs", "--graph", &fixture("a2_instance.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(json(&out).get("normalized").is_some());
    let out = perc(&["lemmas", "--graph", &fixture("a2_instance.json"), "--seed", "4", "--draws", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn mc_is_deterministic() {
    let args = ["mc", "--graph", &fixture("directed_cx.json"), "--conjecture", "postfkg", "--samples", "20000", "--seed", "5"];
    let (a, b) = (perc(&args), perc(&args));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["exact"], false);
}

#[test]
fn search_then_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("run.jsonl");
    let out = perc(&[
        "--out",
        records.to_str().unwrap(),
        "search",
        "--conjecture",
        "postfkg",
        "--n",
        "4",
        "--m",
        "4",
        "--budget",
        "12",
        "--iters",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["records"], 12);
    let text = std::fs::read_to_string(&records).unwrap();
    assert_eq!(text.lines().count(), 12);
    let out = perc(&["frontier", "--input", records.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let tsv = String::from_utf8(out.stdout).unwrap();
    assert!(tsv.starts_with("delta\tepsilon\tenvelope\n"));
    assert_eq!(tsv.lines().count(), 13);
}

#[test]
fn search_reports_violations_with_exit_1() {
    let out = perc(&[
        "search",
        "--conjecture",
        "gluing-naive",
        "--n",
        "5",
        "--m",
        "5",
        "--a-size",
        "3",
        "--law",
        "dyadic-2",
        "--budget",
        "40",
        "--iters",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let first: Value = serde_json::from_slice(out.stdout.split(|&c| c == b'\n').next().unwrap()).unwrap();
    assert_eq!(first["v"], 1);
}

#[test]
fn reduce_half_edge() {
    let out = perc(&["reduce", "--op", "half-edge", "--p", "3/4", "--eps", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["value"], "3/4");
}
