//! End-to-end checks of the binary: exit codes, the structured error
//! contract, and seeded determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hodge-asymp"))
}

fn write_gram() -> PathBuf {
    let dir = std::env::temp_dir().join("hodge_asymp_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g3.json");
    std::fs::write(&path, r#"{"m": 3, "gram": [[-1,0,0],[0,1,0],[0,0,1]]}"#).unwrap();
    path
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON object")
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = bin().args(["chart", "--r", "2", "--s", "1", "--nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_error_is_structured_exit_1() {
    let out = bin()
        .args(["exponent", "jacobian", "--g", "1", "--k", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "BadRange");
}

#[test]
fn jacobian_example() {
    let out = bin()
        .args(["exponent", "jacobian", "--g", "2", "--k", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["report"]["exponent"], 8);
}

#[test]
fn density_brute_matches_closed() {
    let brute = bin()
        .args([
            "density", "--p", "3", "--k", "0", "--u", "1", "--diag", "1,1,1", "--method", "brute",
            "--e", "3",
        ])
        .output()
        .unwrap();
    let closed = bin()
        .args(["density", "--p", "3", "--k", "0", "--u", "1", "--diag", "1,1,1"])
        .output()
        .unwrap();
    let vb = stdout_json(&brute);
    let vc = stdout_json(&closed);
    assert_eq!(vb["value"], vc["value"]);
    assert_eq!(vb["value"], "2/3");
    assert_eq!(vb["stabilized"], true);
}

#[test]
fn chart_2_1_block_matrix() {
    let out = bin().args(["chart", "--r", "2", "--s", "1"]).output().unwrap();
    let v = stdout_json(&out);
    let expected = serde_json::json!([
        ["1/1", "0/1", "-1/1"],
        ["0/1", "1/1", "0/1"],
        ["1/1", "0/1", "1/1"]
    ]);
    assert_eq!(v["S"], expected);
}

#[test]
fn enumerate_emits_config_then_points() {
    let gram = write_gram();
    let out = bin()
        .args(["enumerate", "--gram"])
        .arg(&gram)
        .args(["--u", "1", "--nu", "1", "--box", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(header["count"], 12);
    assert_eq!(lines.count(), 12);
}

#[test]
fn seeded_runs_are_byte_identical() {
    let run = || {
        bin()
            .args(["split-fuzz", "--g", "3", "--cases", "40", "--seed", "99"])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    // a different seed gives a different transcript
    let c = bin()
        .args(["split-fuzz", "--g", "3", "--cases", "40", "--seed", "100"])
        .output()
        .unwrap();
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn negative_values_parse() {
    let brute = bin()
        .args([
            "density", "--p", "5", "--k", "1", "--u", "-1", "--diag", "1,-1,1,1", "--method",
            "brute", "--e", "4",
        ])
        .output()
        .unwrap();
    assert_eq!(brute.status.code(), Some(0), "{:?}", brute);
    let closed = bin()
        .args(["density", "--p", "5", "--k", "1", "--u", "-1", "--diag", "1,-1,1,1"])
        .output()
        .unwrap();
    assert_eq!(stdout_json(&brute)["value"], stdout_json(&closed)["value"]);

    let gram = write_gram();
    let out = bin()
        .args(["invariants", "--gram"])
        .arg(&gram)
        .args(["--v", "-2,1,0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["u"], "-3");
}

#[test]
fn mem_budget_flag_caps_the_oracle() {
    let out = bin()
        .args([
            "density", "--p", "7", "--k", "1", "--u", "1", "--diag", "1,1,1", "--method", "brute",
            "--mem-budget", "1000",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "PrecisionTooLarge");
}

#[test]
fn mem_budget_env_var_is_honored() {
    let out = bin()
        .args([
            "density", "--p", "7", "--k", "1", "--u", "1", "--diag", "1,1,1", "--method", "brute",
        ])
        .env("HODGE_ASYMP_MEM", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["error"]["kind"], "PrecisionTooLarge");
}
