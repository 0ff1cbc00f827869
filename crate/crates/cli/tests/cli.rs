//! End-to-end tests of the command-line interface: spawn the built binary
//! and check output shape, determinism, and the exit-code contract.

use std::path::Path;
use std::process::{Command, Output};

fn carlitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carlitz"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).expect("JSON output")
}

#[test]
fn bc_table_single_row_at_zero() {
    let out = carlitz(&["bc-table", "--p", "3", "--max-n", "0"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,numerator,denominator,denominator_class,val_deg1,val_deg2,bound_deg1,bound_deg2,pass_deg1,pass_deg2"
    );
    let row = lines.next().unwrap();
    assert!(row.starts_with("0,1,1,unit,"), "row: {row}");
    assert_eq!(lines.next(), None);
}

#[test]
fn bc_table_finds_the_quadratic_denominator() {
    let out = carlitz(&["bc-table", "--p", "3", "--max-n", "70"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let row16 = text.lines().find(|l| l.starts_with("16,")).unwrap();
    assert!(row16.contains(",P2,"), "row: {row16}");
    let row70 = text.lines().find(|l| l.starts_with("70,")).unwrap();
    assert!(row70.contains(",unit,"), "row: {row70}");
}

#[test]
fn bc_table_respects_the_met_lattice() {
    let out = carlitz(&["bc-table", "--p", "5", "--max-n", "24"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    let indices: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(indices, ["0", "4", "8", "12", "16", "20", "24"]);
}

#[test]
fn deterministic_output_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let path_str = path.to_str().unwrap();
    let first = carlitz(&["bc-table", "--p", "3", "--max-n", "20", "--out", path_str]);
    assert!(first.status.success());
    let bytes_first = std::fs::read(&path).unwrap();
    let second = carlitz(&["bc-table", "--p", "3", "--max-n", "20", "--out", path_str]);
    assert!(second.status.success());
    assert_eq!(bytes_first, std::fs::read(&path).unwrap());

    let v1 = carlitz(&["verify", "--identity", "interp", "--d", "2"]);
    let v2 = carlitz(&["verify", "--identity", "interp", "--d", "2"]);
    assert!(v1.status.success());
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn verify_dispatch_and_exit_codes() {
    let ok = carlitz(&["verify", "--identity", "interp-product", "--p", "3", "--s", "4", "--d", "1"]);
    assert!(ok.status.success());
    let report = json(&ok);
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["millis"], serde_json::Value::from(0));

    let unknown = carlitz(&["verify", "--identity", "nonsense"]);
    assert_eq!(unknown.status.code(), Some(2));

    let usage = carlitz(&["verify", "--identity", "bc-recur-1"]);
    assert_eq!(usage.status.code(), Some(2), "missing --n is a usage error");

    let bad_flag = carlitz(&["verify", "--no-such-flag"]);
    assert_eq!(bad_flag.status.code(), Some(2));
}

#[test]
fn verify_explicit_value_example() {
    let out = carlitz(&[
        "verify", "--identity", "explicit-L", "--p", "3", "--s", "3", "--k", "1", "--N", "24",
        "--M", "3",
    ]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert!(report["certified_precision_exponent"].as_i64().unwrap() >= 12);
}

#[test]
fn verify_recurrences_runs_every_instance() {
    let out = carlitz(&["verify", "--identity", "bc-recur-1", "--n", "16"]);
    assert!(out.status.success());
    let reports = json(&out);
    let arr = reports.as_array().unwrap();
    assert_eq!(arr.len(), 3, "one report per residue");
    assert!(arr.iter().all(|r| r["pass"] == serde_json::Value::Bool(true)));

    let out2 = carlitz(&["verify", "--identity", "bc-recur-2", "--n", "16"]);
    assert!(out2.status.success());
    let arr2 = json(&out2);
    assert_eq!(arr2.as_array().unwrap().len(), 3, "one report per quadratic");
}

#[test]
fn verify_limits_families() {
    let out = carlitz(&["verify", "--identity", "limits", "--family", "ed-to-exp"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["pass"], serde_json::Value::Bool(true));
    assert_eq!(report["family"], serde_json::Value::from("ed-to-exp"));

    let bad = carlitz(&["verify", "--identity", "limits", "--family", "no-such"]);
    assert_eq!(bad.status.code(), Some(2));

    let missing = carlitz(&["verify", "--identity", "limits"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn divisibility_report_shapes() {
    let out = carlitz(&["divisibility", "--p", "3", "--n", "16", "--degree", "2"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["measured"].as_u64().unwrap() as i64 >= report["bound"]["exponent"].as_i64().unwrap(), true);
    assert_eq!(report["per_irreducible"].as_array().unwrap().len(), 3);

    let degenerate = carlitz(&["divisibility", "--p", "3", "--n", "2", "--degree", "2"]);
    assert!(degenerate.status.success(), "warnings, not a crash");
    let report2 = json(&degenerate);
    assert!(!report2["warnings"].as_array().unwrap().is_empty());
    assert!(report2["bound"].is_null());
}

#[test]
fn scan_emits_rows_and_passes() {
    let out = carlitz(&["scan", "--p", "3", "--degree", "2", "--to", "100"]);
    assert!(out.status.success(), "a failing row would exit nonzero");
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,digit_sum,tuple,conjectured_exponent,measured,pass"
    );
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.ends_with(",true")));
}

#[test]
fn tuples_reproduce_the_printed_examples() {
    let out = carlitz(&["tuples", "--p", "3", "--n", "304"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["norm1_maximal"]["beta"], serde_json::json!([1, 3, 3, 5]));
    assert_eq!(report["norm2_maximal"]["beta"], serde_json::json!([2, 2, 3, 5]));
    assert_eq!(report["norm2_maximal"]["n_minus_norm2"], serde_json::json!(16));

    let out646 = carlitz(&["tuples", "--p", "3", "--n", "646"]);
    let report646 = json(&out646);
    assert_eq!(report646["norm2_maximal"]["beta"], serde_json::json!([4, 2, 5, 5]));
    assert_eq!(report646["norm2_maximal"]["n_minus_norm2"], serde_json::json!(70));

    let degenerate = carlitz(&["tuples", "--p", "3", "--n", "4"]);
    assert!(degenerate.status.success());
    let report4 = json(&degenerate);
    assert!(!report4["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn out_flag_writes_the_file_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = carlitz(&[
        "tuples", "--p", "3", "--n", "304", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout_str(&out).is_empty());
    assert!(Path::new(&path).exists());
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(body["n"], serde_json::json!(304));
}
