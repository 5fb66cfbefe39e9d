mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::data;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_normplane")).args(args).output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = vec!["--out", dir.to_str().unwrap()];
    all.extend_from_slice(args);
    run(&all)
}

fn path(name: &str) -> String {
    data(name).to_str().unwrap().to_string()
}

fn json_file(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn diagnostics(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stderr)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap_or_else(|_| panic!("not a JSON line: {l}")))
        .collect()
}

fn well_formed_svg(text: &str) {
    assert!(text.starts_with("<?xml"));
    assert!(text.trim_end().ends_with("</svg>"));
    assert_eq!(text.matches("<g").count(), text.matches("</g>").count());
    assert!(!text.contains("NaN") && !text.contains("inf"));
}

#[test]
fn validate_accepts_builtins_and_files() {
    for name in ["euclidean", "square", "regular_2k_gon", "mixed_example21"] {
        assert_eq!(run(&["validate", "--ball", name]).status.code(), Some(0), "{name}");
    }
    assert_eq!(run(&["validate", "--ball", &path("mixed_ball.json")]).status.code(), Some(0));
    assert_eq!(run(&["validate", "--curve", &path("rectangle.json")]).status.code(), Some(0));
}

#[test]
fn invalid_inputs_exit_one_with_a_kind() {
    let out = run(&["validate", "--ball", &path("broken_ball.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(diagnostics(&out)[0]["kind"], "NotSymmetric");

    let out = run(&["validate", "--curve", &path("nonclosing_curve.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(diagnostics(&out)[0]["kind"], "NotClosed");

    let out = run(&["validate", "--ball", "no_such_ball"]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["analyze", "--curve", "/nonexistent/curve.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(diagnostics(&out)[0]["level"], "error");
}

#[test]
fn analyze_reports_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["analyze", "--curve", &path("example22_radius.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_file(dir.path(), "analyze.json");
    let l_star = v["ledger"]["l_star"].as_f64().unwrap();
    assert!((l_star - 13.58).abs() <= 0.05);
    let a_wc = v["decomposition"]["wc_area_once_around"].as_f64().unwrap();
    assert!((a_wc + 1.33).abs() <= 0.02);
    assert!(v["violations"].as_array().unwrap().is_empty());
    let stdout: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stdout, v);
}

#[test]
fn decompose_writes_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["decompose", "--curve", &path("example22_radius.json"), "--svg"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_file(dir.path(), "decompose.json");
    assert!((v["cwms"]["area_full_period"].as_f64().unwrap() + 0.48).abs() <= 0.02);
    well_formed_svg(&std::fs::read_to_string(dir.path().join("decompose.svg")).unwrap());
}

#[test]
fn lhuilier_writes_report_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["lhuilier", "--polygon", &path("heptagon.json"), "--svg"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_file(dir.path(), "lhuilier.json");
    assert!(v["gap"].as_f64().unwrap() >= -v["tol"].as_f64().unwrap());
    assert_eq!(v["K1_0"].as_array().unwrap().len() % 2, 0);
    well_formed_svg(&std::fs::read_to_string(dir.path().join("lhuilier.svg")).unwrap());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        assert_eq!(run_in(dir.path(), &["decompose", "--curve", &path("hexagon_curve.json"), "--svg"]).status.code(), Some(0));
        assert_eq!(run_in(dir.path(), &["corpus", "--seed", "3", "--n", "8"]).status.code(), Some(0));
    }
    for name in ["decompose.json", "decompose.svg", "corpus.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn injected_fault_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["corpus", "--seed", "42", "--n", "8", "--inject-fault", "cwms-sign"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_file(dir.path(), "corpus.json");
    assert!(v["violations"].as_u64().unwrap() > 0);
    assert!(diagnostics(&out).iter().any(|d| d["kind"] == "PropertyViolation"));
}

#[test]
fn empty_corpus_succeeds() {
    assert_eq!(run(&["corpus", "--n", "0"]).status.code(), Some(0));
}

#[test]
fn bad_tolerance_is_rejected() {
    assert_eq!(run(&["--rel-tol", "-1", "validate", "--ball", "square"]).status.code(), Some(1));
}
