//! End-to-end checks of the command-line surface: output pins, exit
//! codes, and byte-for-byte determinism.

use std::process::{Command, Output};

fn trimap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trimap"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn count_maps_matches_spec_examples() {
    let out = trimap(&["count-maps", "--profile", "3,3", "--all-genera"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["0"], 12);
    assert_eq!(json["1"], 3);

    let out = trimap(&["count-maps", "--profile", "1,1,3,3", "--genus", "1"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "0");
}

#[test]
fn identical_configs_produce_identical_bytes() {
    let args = ["genus", "--gmax", "1", "--order", "10", "--emit", "json"];
    let first = trimap(&args);
    let second = trimap(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);

    let args = ["equilibrium", "--t3", "0.03", "--order", "8", "--digits", "30"];
    let first = trimap(&args);
    let second = trimap(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn configuration_errors_exit_two() {
    let out = trimap(&["count-maps", "--profile", "3,x"]);
    assert_eq!(out.status.code(), Some(2));
    let out = trimap(&["count-maps", "--profile", "3,3,3,3,3,3,3,3", "--all-genera"]);
    assert_eq!(out.status.code(), Some(2), "dart bound must be surfaced");
    let out = trimap(&["series", "--op", "div", "--a", r#"{"var":"s","order":2,"coeffs":["1","0","0"]}"#,
        "--b", r#"{"var":"s","order":2,"coeffs":["0","1","0"]}"#]);
    assert_eq!(out.status.code(), Some(2), "division by non-unit is a surfaced error");
}

#[test]
fn series_calculator_geometric() {
    let out = trimap(&[
        "series",
        "--op",
        "div",
        "--a",
        r#"{"var":"s","order":4,"coeffs":["1","0","0","0","0"]}"#,
        "--b",
        r#"{"var":"s","order":4,"coeffs":["1","-1","0","0","0"]}"#,
    ]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["coeffs"], serde_json::json!(["1", "1", "1", "1", "1"]));
}

#[test]
fn motzkin_entry_wire_format() {
    let out = trimap(&["motzkin", "entry", "--power", "1", "--from", "1", "--to", "0"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json, serde_json::json!([{"coeff": 1, "a": [], "b2": [1]}]));
}

#[test]
fn hierarchy_emits_z1_and_certificate() {
    let out = trimap(&["hierarchy", "--gmax", "1", "--order", "8"]);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["z"][1]["coeffs"][4], "810");
    assert!(json["residual_certificate"].as_str().unwrap().contains("vanish"));
    assert_eq!(json["resonance_constants"][1]["provenance"], "OracleCount");
}

#[test]
fn genus_csv_has_provenance_column() {
    let out = trimap(&["genus", "--gmax", "1", "--order", "8", "--emit", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("g,order,coefficient,provenance"));
    assert!(text.contains("1,2,3/2,injected:oracle"));
}

#[test]
fn verify_fast_passes() {
    let out = trimap(&["verify", "--fast", "--order", "16"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("all 7 checks passed"));
}
