use std::process::{Command, Output};

use nstar_cli::report::Report;

fn nstar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nstar")).args(args).env_remove("NSTAR_DEFAULT_TOL").output().expect("binary runs")
}

fn json(args: &[&str]) -> (Report, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = nstar(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Report = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (report, out.status.code().unwrap())
}

fn value(r: &Report, key: &str) -> f64 {
    r.rows.iter().find(|row| row.key == key).unwrap_or_else(|| panic!("no row {key}")).values[0].unwrap()
}

#[test]
fn norm_of_identity() {
    let (r, code) = json(&["norm", "--phi", "power:p=0.5", "--space", "interval:L=1,N=100000", "--fn", "identity"]);
    assert_eq!(code, 0);
    assert!((value(&r, "luxemburg_norm") - 4.0 / 9.0).abs() < 1e-5);
    assert!(value(&r, "lambda_residual") <= 1e-10);
}

#[test]
fn nonconvex_demo_reaches_ten() {
    let (r, code) =
        json(&["demo", "nonconvex", "--phi", "power:p=0.5", "--epsilon", "1", "--n", "100", "--atoms", "equal:100"]);
    assert_eq!(code, 0);
    assert_eq!(r.rows.len(), 100);
    let last = r.rows.last().unwrap().values[0].unwrap();
    assert!((last - 10.0).abs() < 1e-9);
}

#[test]
fn full_check_suite_passes_and_reports_sum_form() {
    let (r, code) =
        json(&["check", "--phi", "power:p=0.5", "--space", "interval:L=1,N=1000", "--suite", "all", "--seed", "7"]);
    assert_eq!(code, 0, "{r:?}");
    assert!(r.pass);
    assert_eq!(r.rows.len(), 8);
    assert!(r.notes.iter().any(|n| n.contains("sum form")));
}

#[test]
fn identical_seeds_give_identical_bytes() {
    for format in ["json", "csv"] {
        let args = [
            "check",
            "--phi",
            "log_sqrt",
            "--space",
            "atomic:masses=0.5/1/2",
            "--suite",
            "young,modular_bound",
            "--seed",
            "3",
            "--format",
            format,
        ];
        let a = nstar(&args);
        let b = nstar(&args);
        assert_eq!(a.stdout, b.stdout);
        assert!(!a.stdout.is_empty());
    }
    let a = nstar(&[
        "dual-norm",
        "--phi",
        "power:p=0.5",
        "--space",
        "atomic:masses=0.2/0.5/1",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    let b = nstar(&[
        "dual-norm",
        "--phi",
        "power:p=0.5",
        "--space",
        "atomic:masses=0.2/0.5/1",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_reports_reparse() {
    let out = nstar(&[
        "demo",
        "halving",
        "--phi",
        "power:p=0.5",
        "--space",
        "interval:L=1,N=16384",
        "--iterations",
        "6",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("iteration,modular,functional_value,bound"));
    let r = Report::from_csv("demo halving", &text).unwrap();
    assert_eq!(r.rows.len(), 7);

    let (j, _) =
        json(&["demo", "halving", "--phi", "power:p=0.5", "--space", "interval:L=1,N=16384", "--iterations", "6"]);
    assert_eq!(j.rows, r.rows);
}

#[test]
fn every_command_emits_parseable_json() {
    let runs: &[&[&str]] = &[
        &["validate", "--phi", "power_scaled:p=0.5"],
        &["metric", "--phi", "power:p=0.5", "--space", "interval:L=1,N=10", "--fn", "constant:c=1"],
        &["conjugate", "--phi", "log_sqrt", "--points", "5"],
        &["delta2", "--phi", "power:p=0.5"],
        &["dual-norm", "--phi", "power:p=0.5", "--space", "atomic:masses=0.25", "--functional", "coefficients:1"],
    ];
    for args in runs {
        let (r, code) = json(args);
        assert_eq!(code, 0, "{args:?}");
        assert!(r.pass);
    }
    let (r, _) =
        json(&["dual-norm", "--phi", "power:p=0.5", "--space", "atomic:masses=0.25", "--functional", "coefficients:1"]);
    assert_eq!(value(&r, "norm_formula"), 16.0);
    assert_eq!(value(&r, "bruteforce"), 16.0);
    let (r, _) = json(&["delta2", "--phi", "power:p=0.5"]);
    assert!(r.rows.iter().all(|row| (row.values[0].unwrap() - 4.0).abs() < 1e-10));
}

#[test]
fn assertion_failures_exit_one() {
    // k0 = 3 < 4 = 2^{1/p}: the doubling hypothesis fails on the grid
    let out = nstar(&["delta2", "--phi", "power:p=0.5", "--k0", "3"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));

    let out = nstar(&["demo", "halving", "--phi", "power:p=0.5", "--space", "equal:4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("atom"));

    let out =
        nstar(&["check", "--phi", "power:p=0.5", "--space", "equal:3", "--suite", "reversed_jensen", "--tol", "-1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_two_with_context() {
    // an increasing density is not a valid N*-density
    let out = nstar(&[
        "validate",
        "--phi",
        r#"{"family":"tabulated_density","params":{"points":[[0.1,0.2],[1,2],[10,20]]}}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-increasing"));

    let out = nstar(&[
        "norm",
        "--phi",
        "{\"family\": \"power\",\n\"params\": {\"p\": oops}}",
        "--space",
        "equal:2",
        "--fn",
        "identity",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let out = nstar(&["norm", "--phi", "power:p=0.5", "--space", r#"{"kind":"interval","L":1}"#, "--fn", "identity"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`N`"));

    let out = nstar(&["norm", "--phi", "power:p=0.5", "--space", "equal:2", "--fn", "constant:k=1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.k"));

    assert_eq!(nstar(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        nstar(&["check", "--phi", "power:p=0.5", "--space", "equal:2", "--suite", "bogus"]).status.code(),
        Some(2)
    );
}

#[test]
fn tolerance_from_environment() {
    let run = |tol: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_nstar"));
        c.args([
            "dual-norm",
            "--phi",
            "power:p=0.5",
            "--space",
            "atomic:masses=1",
            "--functional",
            "coefficients:2",
            "--format",
            "json",
        ]);
        match tol {
            Some(t) => c.env("NSTAR_DEFAULT_TOL", t),
            None => c.env_remove("NSTAR_DEFAULT_TOL"),
        };
        c.output().unwrap()
    };
    assert_eq!(run(Some("1e-6")).status.code(), Some(0));
    assert_eq!(run(Some("not-a-number")).status.code(), Some(2));
}

#[test]
fn config_documents() {
    let dir = std::env::temp_dir().join(format!("nstar-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("suite.json");
    std::fs::write(
        &path,
        r#"{"phi": "power:p=0.5", "space": {"kind": "atomic", "masses": [0.5, 1, 2]}, "checks": ["l1_embedding", "reversed_jensen"], "samples": 10, "seed": 4, "tolerances": {"slack": 1e-9}}"#,
    )
    .unwrap();
    let out_path = dir.join("report.json");
    let out =
        nstar(&["check", "--config", path.to_str().unwrap(), "--format", "json", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let r: Report = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r.rows.iter().map(|r| r.key.as_str()).collect::<Vec<_>>(), vec!["l1_embedding", "reversed_jensen"]);
    assert!(r.rows.iter().all(|row| row.values[2] == Some(10.0)));

    let demo = r#"{"theta": 0.3333333333333333, "iterations": 4}"#;
    let (r, code) =
        json(&["demo", "halving", "--phi", "power:p=0.5", "--space", "interval:L=1,N=8192", "--config", demo]);
    assert_eq!(code, 0);
    assert_eq!(r.rows.len(), 5);
    std::fs::remove_dir_all(&dir).unwrap();
}
