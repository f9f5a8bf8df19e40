//! Black-box tests of the command-line binary.

use std::process::{Command, Output};

fn agmon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agmon"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn constants_output_is_deterministic() {
    let a = agmon(&["constants", "--d", "3", "--rho", "0.5:6:0.5"]);
    let b = agmon(&["constants", "--d", "3", "--rho", "0.5:6:0.5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_round_trips_through_the_library() {
    let out = agmon(&["constants", "--d", "2", "--rho", "1,3,7.2"]);
    assert!(out.status.success());
    let dim = agmon::coefficients::SphereDim::new(2).unwrap();
    let mut rows = 0;
    for line in stdout(&out).lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let rho: f64 = fields[0].parse().unwrap();
        let c: f64 = fields[1].parse().unwrap();
        let s: f64 = fields[2].parse().unwrap();
        assert_eq!(c, agmon::sharp::sharp_constant(dim, rho, None).unwrap().value);
        assert_eq!(s, agmon::stability::stability_constant(dim, rho, None).unwrap().value);
        rows += 1;
    }
    assert_eq!(rows, 3);
}

#[test]
fn hinted_zero_row() {
    let out = agmon(&["constants", "--d", "2", "--at-zero", "nu:1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    let rho: f64 = fields[0].parse().unwrap();
    assert!((rho - 2.404825557695773).abs() < 1e-12);
    assert_eq!(fields[3], "nu_zero");
    assert_eq!(fields[4], "0|1");
    assert_eq!(fields[6], "ok");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(agmon(&["constants", "--d", "2", "--rho", "0:1:0.1"]).status.code(), Some(2));
    assert_eq!(agmon(&["constants", "--d", "1", "--rho", "1"]).status.code(), Some(2));
    assert_eq!(agmon(&["constants", "--d", "2"]).status.code(), Some(2));
    assert_eq!(agmon(&["deficit", "--d", "2", "--rho", "3", "x=1"]).status.code(), Some(2));
    assert_eq!(agmon(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn deficit_examples() {
    // constants are not maximisers at rho = 3
    let out = agmon(&["deficit", "--d", "2", "--rho", "3", "--format", "csv", "0=1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let deficit: f64 = fields[1].parse().unwrap();
    let distance_sq: f64 = fields[2].parse().unwrap();
    assert_eq!(distance_sq, 1.0);
    let dim = agmon::coefficients::SphereDim::new(2).unwrap();
    let gap = -agmon::coefficients::gap_consecutive(0, dim, 3.0).unwrap();
    assert!((deficit - gap).abs() < 1e-14);

    let out = agmon(&["deficit", "--d", "2", "--rho", "3", "--format", "csv", "1=1"]);
    let text = stdout(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[1].parse::<f64>().unwrap(), 0.0);

    let out = agmon(&[
        "deficit", "--d", "2", "--rho", "3", "--format", "csv", "0=0.5", "1=0.5", "4=0.1",
    ]);
    let text = stdout(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let deficit: f64 = fields[1].parse().unwrap();
    let lower: f64 = fields[3].parse().unwrap();
    let upper: f64 = fields[4].parse().unwrap();
    assert!(lower < deficit && deficit < upper);
}

#[test]
fn zeros_are_sorted_with_small_residuals() {
    let out = agmon(&["zeros", "--d", "2", "--x-max", "30"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut last: Option<(String, f64)> = None;
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let order = fields[0].to_string();
        let zero: f64 = fields[2].parse().unwrap();
        let residual: f64 = fields[3].parse().unwrap();
        assert!(residual.abs() < 1e-12, "{line}");
        if let Some((prev_order, prev_zero)) = last {
            if prev_order == order {
                assert!(zero > prev_zero, "{line}");
            }
        }
        last = Some((order, zero));
    }
}

#[test]
fn perturbed_verification_fails() {
    let out = agmon(&["verify", "--quick", "--perturb"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"pass\": false"));
}

#[test]
fn probe_reports_the_kink() {
    let out = agmon(&["probe", "--d", "2", "--at-zero", "nu:1"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["c_kink"]["classification"], "Kink");
    assert_eq!(doc["s_jump"]["classification"], "Jump");
}
