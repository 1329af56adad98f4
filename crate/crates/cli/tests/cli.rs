use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sml"))
        .args(args)
        .output()
        .expect("run sml")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_rol_example3() {
    let out = sml(&["solve", &fixture("example3.json"), "--method", "rol"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["method"], "ROL");
    assert_eq!(doc["assortment"], serde_json::json!(["x11", "x21", "x22"]));
    assert!((doc["revenue"].as_f64().unwrap() - 65.0 / 12.0).abs() < 1e-12);
    assert_eq!(doc["thresholds"], serde_json::json!([1, 2]));
    assert_eq!(doc["evaluations"], 6);
}

#[test]
fn solve_ro_example5_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("result.json");
    let out = sml(&[
        "solve",
        &fixture("example5.json"),
        "--method",
        "ro",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(doc["assortment"], serde_json::json!(["x11", "x21"]));
    assert!((doc["revenue"].as_f64().unwrap() - 8.12).abs() < 5e-3);
}

#[test]
fn solve_empty_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "empty.json", r#"{"format_version":1,"u0":1,"products":[]}"#);
    let out = sml(&["solve", &path, "--method", "rol"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["assortment"], serde_json::json!([]));
    assert_eq!(doc["revenue"].as_f64(), Some(0.0));
}

#[test]
fn solve_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write_temp(&dir, "bad.json", "{ nope");
    assert_eq!(sml(&["solve", &garbage]).status.code(), Some(2));
    assert_eq!(sml(&["solve", "/no/such/file.json"]).status.code(), Some(2));

    let three = write_temp(
        &dir,
        "three.json",
        r#"{"format_version":1,"u0":1,"products":[
            {"id":"a","level":1,"revenue":1,"utility":1},
            {"id":"b","level":2,"revenue":1,"utility":1},
            {"id":"c","level":3,"revenue":1,"utility":1}]}"#,
    );
    let out = sml(&["solve", &three, "--method", "rol"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
    let out = sml(&["solve", &three, "--method", "palm-rol"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["method"], "PALM_ROL");
    assert_eq!(doc["certified_optimal"], false);

    let products: Vec<String> = (0..21)
        .map(|i| format!(r#"{{"id":"p{i}","level":1,"revenue":1,"utility":1}}"#))
        .collect();
    let big = write_temp(
        &dir,
        "big.json",
        &format!(r#"{{"format_version":1,"u0":1,"products":[{}]}}"#, products.join(",")),
    );
    assert_eq!(sml(&["solve", &big, "--method", "brute"]).status.code(), Some(4));
    assert_eq!(sml(&["verify", &big]).status.code(), Some(4));
}

#[test]
fn verify_example3_reports_x22() {
    let out = sml(&["verify", &fixture("example3.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("optimum {x11,x21,x22}"));
    assert!(text.contains("[does not hold] level2_product_bound[x22]"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_example1_prints_regularity_witness() {
    let out = sml(&["verify", &fixture("example1.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("regularity violation: rho(b1, {a1,b1})"));
}

#[test]
fn verify_single_product() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "one.json",
        r#"{"format_version":1,"u0":1,"products":[{"id":"a","level":1,"revenue":3,"utility":2}]}"#,
    );
    let out = sml(&["verify", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("effects (offer sets up to 4 products): 0"));
}

#[test]
fn benchmark_inline_flags_and_determinism() {
    let run = || sml(&["benchmark", "--n1", "5", "--n2", "5", "--u0", "2.5", "--instances", "10", "--seed", "3"]);
    let (a, b) = (run(), run());
    assert_eq!(a.status.code(), Some(0));
    let gaps = |o: &Output| -> Vec<String> {
        stdout(o)
            .lines()
            .skip(1)
            .map(|l| l.split(',').take(5).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert_eq!(gaps(&a), gaps(&b));
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n1,n2,u0,avg_gap_pct,worst_gap_pct,avg_time_ro_s,avg_time_rol_s")
    );
    assert!(lines.next().unwrap().starts_with("5,5,2.5,"));
}

#[test]
fn benchmark_empty_families() {
    let out = sml(&["benchmark", "--n1", "0", "--n2", "0", "--instances", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let row = stdout(&out).lines().nth(1).unwrap().to_string();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(&fields[..2], ["0", "0"]);
    assert_eq!(&fields[3..5], ["0", "0"]);
}

#[test]
fn benchmark_config_file_and_out() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_temp(
        &dir,
        "families.json",
        r#"{"families":[{"n1":3,"n2":3,"u0":0,"instances":5,"seed":1},
                        {"n1":3,"n2":3,"u0":5,"instances":5,"seed":1}]}"#,
    );
    let csv = dir.path().join("report.csv");
    let out = sml(&["benchmark", "--config", &config, "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(stdout(&out).contains("avg gap %"));
}

#[test]
fn benchmark_invalid_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_temp(&dir, "bad.json", r#"{"families":[{"n1":3,"n2":3,"u0":-1}]}"#);
    assert_eq!(sml(&["benchmark", "--config", &config]).status.code(), Some(2));
    assert_eq!(sml(&["benchmark", "--instances", "0", "--n1", "1"]).status.code(), Some(2));
    assert_eq!(sml(&["benchmark", "--n1", "abc"]).status.code(), Some(2));
}

#[test]
fn gen_emits_parseable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inst.json");
    let out = sml(&[
        "gen", "--n1", "4", "--n2", "3", "--u0", "1", "--seed", "5", "--index", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let instance = sml_assortment::io::read_instance(&path).unwrap();
    assert_eq!(instance.len(), 7);
    let again = sml(&["gen", "--n1", "4", "--n2", "3", "--u0", "1", "--seed", "5", "--index", "2"]);
    assert_eq!(
        sml_assortment::io::parse_instance(&stdout(&again)).unwrap(),
        instance
    );
    let out = sml(&["solve", path.to_str().unwrap(), "--method", "brute"]);
    assert_eq!(out.status.code(), Some(0));
}
