use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str], order_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tate-kappa"));
    cmd.args(args).env_remove("TATE_KAPPA_ORDER");
    if let Some(o) = order_env {
        cmd.env("TATE_KAPPA_ORDER", o);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn orbits_example() {
    let out = run(&["orbits", "--group", "A1", "--level", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let v = json(&out);
    let orbits = v["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 3);
    assert_eq!(orbits.iter().filter(|o| o["regular"] == Value::Bool(true)).count(), 1);
}

#[test]
fn theta_example() {
    let out = run(&["theta", "--torus", "[[3]]", "--order", "10"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let basis = v["basis"].as_array().unwrap();
    assert_eq!(basis.len(), 3);
    assert!(basis.iter().all(|b| b["invariant"] == Value::Bool(true)));
    assert_eq!(v["pairing"]["det_is_unit"], Value::Bool(true));
}

#[test]
fn character_schema() {
    let out = run(&["character", "--group", "A1", "--level", "1", "--weight", "[0]", "--order", "3"], None);
    let v = json(&out);
    assert_eq!(v["group"], "A1");
    assert_eq!(v["highest_weight"], serde_json::json!([0]));
    let dims: Vec<i64> = v["layers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|l| l["weights"].as_array().unwrap().iter().map(|w| w["mult"].as_i64().unwrap()).sum())
        .collect();
    assert_eq!(dims, vec![1, 3, 4, 7]);
}

#[test]
fn order_flag_beats_environment() {
    let args = ["character", "--group", "A1", "--level", "1", "--weight", "0"];
    assert_eq!(json(&run(&args, Some("2")))["order"], 2);
    let mut with_flag = args.to_vec();
    with_flag.extend(["--order", "4"]);
    assert_eq!(json(&run(&with_flag, Some("2")))["order"], 4);
    assert_eq!(json(&run(&args, None))["order"], 10);
}

#[test]
fn error_exit_codes() {
    let out = run(&["theta", "--torus", "[[-3]]"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: theta_torus::NotPositive"));
    let out = run(&["pair", "--group", "A1", "--level", "0"], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["orbits", "--group", "A1", "--level", "1", "--format", "xml"], None).status.code(), Some(2));
}

#[test]
fn verify_reports_the_theta_pairing_failure() {
    let out = run(&["verify", "--order", "8", "--seed", "7"], None);
    let v = json(&out);
    let failed: Vec<&str> = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == Value::Bool(false))
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(failed, vec!["theta_torus.pairing_unit"]);
    assert_eq!(v["passed"], Value::Bool(false));
    assert_eq!(out.status.code(), Some(1));
}
