use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn psym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psym")).args(args).output().unwrap()
}

fn tmp(name: &str, body: &str) -> String {
    let p = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(psym(&["--help"]).status.code(), Some(0));
    assert_eq!(psym(&["--version"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(psym(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(psym(&["index-path", "--m", "0"]).status.code(), Some(1));
    assert_eq!(psym(&["index-path", "--path", "/nonexistent/path.json"]).status.code(), Some(1));
    let bad = tmp("cli_bad_path.json", r#"{ "kind": "constant", "n": 2 }"#);
    assert_eq!(psym(&["index-path", "--path", &bad]).status.code(), Some(1));
}

#[test]
fn iterate_case_table() {
    let out = psym(&["iterate", "--case", "7", "--theta", "2.0943951023931957", "--i1", "1", "--m", "1,2,3", "--reproducible"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "iterate");
    assert!(r["verdicts"].as_array().unwrap().iter().all(|v| v["status"] != "fail"));
}

#[test]
fn iterate_without_i1_is_a_usage_error() {
    assert_eq!(psym(&["iterate", "--case", "1"]).status.code(), Some(1));
}

#[test]
fn index_path_constant_coefficient() {
    let p = tmp("cli_c1.json", r#"{ "kind": "constant", "n": 2, "kappa": 0, "c": 1.0, "length": 6.283185307179586 }"#);
    let out = psym(&["index-path", "--path", &p, "--m", "1,3", "--reproducible"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    let cc = &r["results"]["constant_coefficient"];
    assert_eq!(cc["closed_form"], cc["crossing_minus_kappa"]);
    assert_eq!(r["results"]["indices"][0]["i"], 4);
}

#[test]
fn reproducible_reports_are_byte_identical() {
    let s = tmp("cli_surface.json", r#"{ "n": 2, "kappa": 0, "radii": [1.0, 1.0] }"#);
    let args = ["find-orbits", "--surface", s.as_str(), "--restarts", "1", "--reproducible"];
    let a = psym(&args);
    let b = psym(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_the_report() {
    let p = tmp("cli_c2.json", r#"{ "kind": "constant", "n": 2, "kappa": 1, "c": 0.5, "length": 3.0 }"#);
    let dest = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_out.json");
    let _ = std::fs::remove_file(&dest);
    let out = psym(&["index-path", "--path", &p, "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(r["command"], "index-path");
}

#[test]
fn mutated_splitting_table_exits_two() {
    let out = psym(&["verify-suite", "--m", "1", "--flip-case7", "--reproducible"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out);
    let failed: Vec<&Value> = r["verdicts"].as_array().unwrap().iter().filter(|v| v["status"] == "fail").collect();
    assert!(!failed.is_empty());
}
