use std::process::{Command, Output};

use serde_json::Value;

use delsub::bounds::BoundReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delsub"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(stdout(out).trim()).expect("stdout is one JSON document")
}

/// parse → emit → parse is a fixpoint, and emission is stable.
fn assert_fixpoint(text: &str) {
    let first: Value = serde_json::from_str(text).unwrap();
    let emitted = serde_json::to_string(&first).unwrap();
    let second: Value = serde_json::from_str(&emitted).unwrap();
    assert_eq!(first, second);
    assert_eq!(emitted, serde_json::to_string(&second).unwrap());
}

fn assert_usage_error(out: &Output) {
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "stderr: {err:?}");
}

#[test]
fn ball_with_formula() {
    let out = run(&["ball", "--word", "0011", "--q", "2", "--formula"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "delsub/1");
    assert_eq!(v["size"], 6);
    assert_eq!(v["formula"], 6);
    assert_eq!(v["agree"], true);
    assert_fixpoint(&stdout(&out));
}

#[test]
fn bound_row_and_sweep() {
    let out = run(&["bound", "--n", "6", "--q", "2", "--s", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rows"][0]["closed_form_bound"], "42");
    let rows: Vec<BoundReport> = serde_json::from_value(v["rows"].clone()).unwrap();
    assert_eq!(serde_json::to_value(&rows).unwrap(), v["rows"]);
    assert_fixpoint(&stdout(&out));

    let out = run(&["bound", "--sweep", "6..9", "--q", "2", "--s", "1", "--greedy", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,q,s,theorem_bound,weight_sum,greedy_size,constructed_size");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("6,2,1,42,"));

    let out = run(&["--float", "bound", "--n", "8", "--q", "2", "--s", "1"]);
    let v = json(&out);
    assert!((v["rows"][0]["closed_form_bound"].as_f64().unwrap() - 35.6).abs() < 1e-9);

    let out = run(&["bound", "--n", "7", "--q", "2", "--s", "1", "--exact-sum"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["transversal_checks"][0]["verdict"], "pass");
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--kind", "binary", "--n", "10", "--params", "auto"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_fixpoint(&stdout(&out));

    let dir = std::env::temp_dir().join(format!("delsub-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "n=4\n0110\n0100\n").unwrap();
    let out = run(&["verify", "--code-file", bad.to_str().unwrap(), "--t", "1", "--s", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["verdict"], "fail");
    assert!(v["witness"]["z"].is_string());
    assert_fixpoint(&stdout(&out));

    let good = dir.join("good.txt");
    std::fs::write(&good, "n=6\n000000\n111111\n").unwrap();
    let out = run(&["verify", "--code-file", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn construct_reports() {
    let out = run(&["construct", "--kind", "binary", "--n", "12", "--params", "auto"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["moduli"], serde_json::json!([37, 433, 5185, 5]));
    assert!(v["size"].as_u64().unwrap() >= 1);

    let out = run(&["construct", "--kind", "qary", "--n", "6", "--q", "3", "--params", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["inner_provenance"], "searched");
}

#[test]
fn decode_round_trip() {
    let out = run(&["decode", "--code", "n=8;a=11;b=120;c=540;d=3", "--received", "1111111"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["status"], "decoded");
    assert_eq!(v["codeword"], "11111111");
    assert_fixpoint(&stdout(&out));

    let out = run(&["decode", "--code", "n=8;a=11;b=120;c=540;d=3", "--received", "0000000"]);
    assert_eq!(json(&out)["status"], "not_a_codeword_channel_output");

    let out = run(&["decode", "--code", "n=8;a=11;b=120;c=540;d=3", "--received", "11"]);
    assert_usage_error(&out);
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--kind", "binary", "--n", "11", "--trials", "500", "--seed", "4"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let line = stdout(&a);
    assert_fixpoint(line.trim());
    let v: Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["successes"], 500);
    assert!(v["generator"].as_str().unwrap().contains("ChaCha20"));

    let out = run(&["simulate", "--kind", "binary", "--n", "8", "--substitutions", "2"]);
    assert_usage_error(&out);
}

#[test]
fn enumerate_lists_codewords() {
    let out = run(&["enumerate", "--kind", "binary", "--n", "8", "--params", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["codewords"][0], "00000000");
    assert_eq!(v["size"].as_u64().unwrap() as usize, v["codewords"].as_array().unwrap().len());
}

#[test]
fn usage_errors() {
    assert_usage_error(&run(&["ball", "--word", "0021", "--q", "2"]));
    assert_usage_error(&run(&["bogus"]));
    assert_usage_error(&run(&["verify", "--kind", "binary"]));
    assert_usage_error(&run(&["--budget", "10", "verify", "--kind", "binary", "--n", "12"]));
    assert_usage_error(&run(&["bound", "--n", "6", "--q", "3", "--s", "2"]));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}
