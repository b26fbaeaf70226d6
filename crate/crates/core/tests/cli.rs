mod common;

use std::process::{Command, Output};

use serde_json::Value;

const TREFOIL: &str = "PD[X[1,4,2,5],X[3,6,4,1],X[5,2,6,3]]";

fn khref(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_khref")).args(args).output().unwrap()
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn error_code(out: &Output) -> (i32, Value) {
    let report: Value = serde_json::from_slice(&out.stderr).unwrap();
    (out.status.code().unwrap(), report)
}

fn data(file: &str) -> String {
    common::data_path(file).to_string_lossy().into_owned()
}

#[test]
fn output_is_deterministic() {
    let a = khref(&["kh", "--pd", TREFOIL]);
    let b = khref(&["kh", "--pd", TREFOIL, "--threads", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json_stdout(&a);
    assert_eq!(v["schema"], 1);
    assert!(!v["cells"].as_array().unwrap().is_empty());
}

#[test]
fn s_of_trefoil_and_mirror() {
    let v = json_stdout(&khref(&["s", "--pd", TREFOIL]));
    let m = json_stdout(&khref(&["s", "--pd", TREFOIL, "--mirror"]));
    assert_eq!(v["s"].as_i64().unwrap(), -m["s"].as_i64().unwrap());
    assert_eq!(v["s"].as_i64().unwrap().abs(), 2);
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let to_file = khref(&["bn", "--pd", TREFOIL, "-o", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    let to_stdout = khref(&["bn", "--pd", TREFOIL]);
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn batch_keeps_input_order() {
    let knots = common::corpus();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.tsv");
    let lines: Vec<String> = knots.iter().take(8).rev().map(|k| format!("{}\t{}\textra", k.name, k.pd)).collect();
    std::fs::write(&path, lines.join("\n")).unwrap();
    let v = json_stdout(&khref(&["batch", "--corpus", path.to_str().unwrap(), "--cmd", "s"]));
    let rows = v["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["name"].as_str().unwrap()).collect();
    let want: Vec<&str> = knots.iter().take(8).rev().map(|k| k.name.as_str()).collect();
    assert_eq!(names, want);
    for (row, k) in rows.iter().zip(knots.iter().take(8).rev()) {
        assert_eq!(row["result"]["s"].as_i64().unwrap(), k.rasmussen as i64, "{}", k.name);
    }
}

#[test]
fn exit_codes() {
    let (code, report) = error_code(&khref(&["kh", "--pd", "PD[X[1,2,3]]"]));
    assert_eq!(code, 2);
    assert_eq!(report["error"]["exit_code"], 2);
    assert_eq!(error_code(&khref(&["sz", "--pd", TREFOIL, "--m", "0"])).0, 3);
    assert_eq!(error_code(&khref(&["kh", "--knot", "/nonexistent/knot.pd"])).0, 1);
    let mismatch = khref(&["refine", "--pd", TREFOIL, "--op", &data("sq2_9_42.json"), "--mirror-op", &data("sq2_m9_42.json")]);
    assert_eq!(error_code(&mismatch).0, 4);
}

#[test]
fn refine_with_operation_files() {
    let v = json_stdout(&khref(&[
        "refine",
        "--knot",
        &data("9_42.pd"),
        "--op",
        &data("sq2_9_42.json"),
        "--mirror-op",
        &data("sq2_m9_42.json"),
    ]));
    assert_eq!((v["s"].as_i64(), v["s_plus"].as_i64(), v["s_minus"].as_i64()), (Some(0), Some(2), Some(0)));
}

#[test]
fn basis_fingerprint_matches_operation_file() {
    let basis = json_stdout(&khref(&["basis", "--knot", &data("9_42.pd")]));
    let op: Value = serde_json::from_str(&std::fs::read_to_string(data("sq2_9_42.json")).unwrap()).unwrap();
    assert_eq!(basis["fingerprint"], op["basis_fingerprint"]);
}

#[test]
fn tube_cobordism_report() {
    let v = json_stdout(&khref(&["cobordism", "--pd", TREFOIL, "--movie", &data("trefoil_tube.json")]));
    assert_eq!(v["is_chain_map"], true);
    assert_eq!(v["respects_filtered_degree"], true);
    assert_eq!(v["euler_characteristic"], 0);
    assert_eq!(v["induced_ranks"]["0"], 2);
}
