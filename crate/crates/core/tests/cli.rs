use std::process::{Command, Output};

use serde_json::Value;

fn pi_esp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pi-esp"))
        .args(args)
        .env_remove("PI_ESP_DIGITS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = pi_esp(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().unwrap(), v)
}

#[test]
fn partial_defaults_to_json_when_piped() {
    let (code, v) = json(&["partial", "-n", "2", "-M", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "partial");
    assert_eq!(v["results"]["exact"], "7/45");
    assert!(v["meta"]["version"].is_string());
    assert!(v["meta"]["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn json_round_trips_byte_identical() {
    let out = pi_esp(&["partial", "-n", "3", "-M", "5", "--format", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(again, text);
}

#[test]
fn table_output() {
    let out = pi_esp(&["partial", "-n", "2", "-M", "3", "--format", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n  M  mode"));
    assert!(text.contains("7/45"));
}

#[test]
fn csv_has_header() {
    let out = pi_esp(&["oracle", "-n", "2", "-M", "4", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,dp,newton,bruteforce,equal"));
    assert_eq!(lines.nth(1), Some("2,94/525,94/525,94/525,true"));
}

#[test]
fn verify_brackets() {
    let (code, v) = json(&["verify", "-n", "1", "-M", "100000"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["bracket_ok"], true);
    let est: f64 = v["results"]["pi_estimate"]["value"].as_str().unwrap().parse().unwrap();
    assert!((est - std::f64::consts::PI).abs() < 1e-5);
}

#[test]
fn verify_f64_mode() {
    let (code, v) = json(&["verify", "-n", "2", "-M", "10000", "--mode", "f64"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["bracket_ok"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pi_esp(&["verify", "-n", "3", "-M", "2"]).status.code(), Some(2));
    assert_eq!(pi_esp(&["partial", "-n", "0", "-M", "2"]).status.code(), Some(2));
    assert_eq!(pi_esp(&["oracle", "-n", "6", "-M", "300"]).status.code(), Some(2));
    assert_eq!(pi_esp(&["expand", "-M", "20000"]).status.code(), Some(2));
    assert_eq!(pi_esp(&["partial", "-n", "2", "-M", "3", "--mode", "decimal", "--digits", "8"]).status.code(), Some(2));
    let out = pi_esp(&["verify", "-n", "3", "-M", "2"]);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least"));
}

#[test]
fn digits_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_pi-esp"))
        .args(["partial", "-n", "1", "-M", "2", "--mode", "decimal"])
        .env("PI_ESP_DIGITS", "20")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"]["value"]["digits"], 20);
    assert_eq!(v["results"]["value"]["value"], "1.1111111111111111111");
}

#[test]
fn expand_with_negative_eval_points() {
    let (code, v) = json(&["expand", "-M", "12", "--eval", "-0.25,0.5", "--mode", "rational"]);
    assert_eq!(code, 0);
    let evals = v["results"]["evaluations"].as_array().unwrap();
    assert_eq!(evals[0]["product"], evals[0]["polynomial"]);
    assert_eq!(evals[1]["product"]["value"], "0");
    assert!(evals.iter().all(|e| e["identity_ok"] == true && e["cos_ok"] == true));
}

#[test]
fn bench_reports_guarded_naive() {
    let (code, v) = json(&["bench", "-n", "3", "-M", "100,2000", "--reps", "1"]);
    assert_eq!(code, 0);
    let rows = v["results"]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["engine"] == "naive" && r["M"] == 2000 && r.get("skipped").is_some()));
    assert_eq!(v["results"]["all_agree"], true);
    assert!(v["results"]["brackets"].as_array().unwrap().iter().all(|b| b["bracket_ok"] == true));
}
