use std::process::{Command, Output};

use serde_json::Value;

fn conjucirc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conjucirc"))
        .args(args)
        .env_remove("CONJUCIRC_SIZE_CAP")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn table_lists_theory_values() {
    let out = conjucirc(&["table", "--dmax", "4"]);
    assert!(out.status.success());
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 6);
    let find = |d: u64, k: u64| {
        rows.iter()
            .find(|r| r["d"] == d && r["k"] == k)
            .map(|r| r["theory"].as_str().unwrap().to_string())
    };
    assert_eq!(find(2, 1).as_deref(), Some("1"));
    assert_eq!(find(3, 1).as_deref(), Some("1/3"));
    assert_eq!(find(3, 2).as_deref(), Some("1"));
    assert_eq!(find(4, 1).as_deref(), Some("1/6"));
    assert_eq!(find(4, 2).as_deref(), Some("3/8"));
}

#[test]
fn young_for_qubits_has_three_rows() {
    let out = conjucirc(&["young", "--n", "4", "--d", "2"]);
    assert!(out.status.success());
    let rows = json(&out);
    let names: Vec<&str> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["partition"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["[4]", "[3,1]", "[2,2]"]);
}

#[test]
fn certify_reports_a_valid_certificate() {
    let out = conjucirc(&["certify", "--d", "3", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["valid"], true);
    assert_eq!(r["dual_c"], "1/3");
    let primal = r["primal_value"].as_f64().unwrap();
    assert!((primal - r["theory_value"].as_f64().unwrap()).abs() < 1e-9);
    assert!(r["min_eig_gap"].as_f64().unwrap() >= -1e-9);
}

#[test]
fn certify_past_the_size_cap_is_partial() {
    let out = Command::new(env!("CARGO_BIN_EXE_conjucirc"))
        .args(["certify", "--d", "3", "--k", "1"])
        .env("CONJUCIRC_SIZE_CAP", "16")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert_eq!(r["complete"], false);
    assert!(r["min_eig_gap"].is_null());
    assert!((r["primal_value"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn fidelity_matches_theory() {
    let out = conjucirc(&[
        "fidelity", "--d", "4", "--k", "1", "--trials", "5", "--seed", "3",
    ]);
    assert!(out.status.success());
    let r = json(&out);
    let theory = r["theory"].as_f64().unwrap();
    assert!((theory - 1.0 / 6.0).abs() < 1e-15);
    assert!((r["observed_min"].as_f64().unwrap() - theory).abs() < 1e-9);
    assert!((r["observed_max"].as_f64().unwrap() - theory).abs() < 1e-9);
}

#[test]
fn invert_heralds_at_one_over_d_squared() {
    let out = conjucirc(&[
        "invert",
        "--d",
        "2",
        "--k",
        "1",
        "--samples",
        "10000",
        "--seed",
        "5",
    ]);
    assert!(out.status.success());
    let r = json(&out);
    assert!((r["conditional_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let rate = r["success_rate"].as_f64().unwrap();
    assert!((rate - 0.25).abs() <= 3.0 * r["binomial_stderr"].as_f64().unwrap());
}

#[test]
fn omega_cross_check() {
    let out = conjucirc(&[
        "omega",
        "--d",
        "2",
        "--k",
        "1",
        "--mc-samples",
        "4000",
        "--seed",
        "1",
    ]);
    assert!(out.status.success());
    assert_eq!(json(&out)["consistent"], true);
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "invert",
        "--d",
        "3",
        "--k",
        "2",
        "--samples",
        "2000",
        "--seed",
        "9",
    ];
    assert_eq!(conjucirc(&args).stdout, conjucirc(&args).stdout);
    let args = [
        "omega",
        "--d",
        "2",
        "--k",
        "1",
        "--mc-samples",
        "1000",
        "--seed",
        "2",
    ];
    assert_eq!(conjucirc(&args).stdout, conjucirc(&args).stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["fidelity", "--d", "3", "--k", "3"],
        vec!["certify", "--d", "1", "--k", "1"],
        vec!["fidelity", "--d", "3"],
        vec!["certify", "--d", "3", "--k", "1", "--tol", "0"],
        vec!["table", "--dmax", "1"],
        vec!["frobnicate"],
    ] {
        assert_eq!(conjucirc(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn csv_columns_follow_the_documented_order() {
    let out = conjucirc(&["table", "--dmax", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,k,theory,theory_value"));
    assert_eq!(lines.next(), Some("2,1,1,1.0"));
    let out = conjucirc(&["fidelity", "--d", "2", "--k", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("d,k,samples,seed,theory,observed_min,observed_max,observed_mean\n"));
}

#[test]
fn text_format_is_key_value() {
    let out = conjucirc(&["fidelity", "--d", "2", "--k", "1", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .lines()
        .any(|l| l.split_whitespace().collect::<Vec<_>>() == ["theory", "1.0"]));
}
