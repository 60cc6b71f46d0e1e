use std::process::Command;

use serde_json::Value;
use weber_cm::report::{Check, Report};
use weber_cm_cli::run;

fn cli(args: &[&str]) -> weber_cm_cli::Outcome {
    run(std::iter::once("weber-cm").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = cli(&all);
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

#[test]
fn classpoly_examples() {
    let out = cli(&["classpoly", "--d", "-31"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "x^3 + x - 1\ncoefficients (ascending): [-1, 1, 0, 1]\n");
    let out = cli(&["classpoly", "--d", "-55"]);
    assert!(out.stdout.ends_with("[-1, -2, 0, 1, 1]\n"), "{}", out.stdout);
    let v = json(&["classpoly", "--d", "-127"]);
    assert_eq!(v["output"]["coefficients"], serde_json::json!(["-1", "3", "1", "-2", "-1", "1"]));
    let v = json(&["classpoly", "--d", "-55", "--kind", "hilbert"]);
    assert_eq!(v["output"]["coefficients"].as_array().unwrap().len(), 5);
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        &["classpoly", "--d", "-10"][..],
        &["classpoly", "--d", "-31", "--kind", "other"],
        &["classpoly", "--d", "-31", "--precision", "64"],
        &["borcherds", "check", "--order", "1"],
        &["yz", "verify", "--d1", "-31", "--d2", "-127", "--s", "5"],
        &["yz", "verify", "--d1", "-31", "--d2", "-31"],
        &["weil", "check", "--suite", "none"],
        &["classpoly", "--d", "-31", "--format", "xml"],
        &["classpoly", "--d", "-31", "--bogus"],
        &["frobnicate"],
        &[],
    ] {
        let out = cli(args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(cli(&["--help"]).code, 0);
}

#[test]
fn yz_verify_prints_eight_passes() {
    let out = cli(&["yz", "verify", "--d1", "-31", "--d2", "-127", "--s", "all"]);
    assert_eq!(out.code, 0);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines.iter().all(|l| l.starts_with("PASS")));
    assert!(out.stdout.contains("s=24: 81\n"));
}

#[test]
fn json_report_schema() {
    let v = json(&["gz", "verify", "--d1", "-31", "--d2", "-127"]);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["command", "inputs", "checks", "elapsed_ms"] {
        assert!(keys.contains(&k), "{keys:?}");
    }
    assert_eq!(v["command"], "gz verify");
    assert_eq!(v["inputs"]["d1"], -31);
    let check = &v["checks"][0];
    assert_eq!(check["status"], "pass");
    assert_eq!(check["lhs"], check["rhs"]);
    assert!(check.get("witness").is_none());
    let report: Report = serde_json::from_value(v).unwrap();
    assert!(report.passed());
}

#[test]
fn bigcm_example() {
    let out = cli(&["bigcm", "check", "--d1", "-31", "--d2", "-127", "--s", "24"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("PASS bigcm d1=-31 d2=-127 s=24: 768 * log(3)\n"), "{}", out.stdout);
    let v = json(&["bigcm", "check", "--d1", "-31", "--d2", "-127", "--s", "24"]);
    assert_eq!(v["checks"][0]["rhs"], "768 * log(3)");
}

#[test]
fn weil_and_borcherds_examples() {
    let out = cli(&["weil", "check", "--d", "24", "--suite", "dims"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("118, 12"), "{}", out.stdout);
    let v = json(&["weil", "check", "--d", "all", "--suite", "udinv"]);
    assert_eq!(v["checks"].as_array().unwrap().len(), 8);
    assert_eq!(cli(&["weil", "check", "--suite", "compact", "--d1", "-31", "--d2", "-127"]).code, 0);
    let out = cli(&["borcherds", "check", "--s", "all", "--eps", "-1", "--order", "4"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
}

#[test]
fn table_formats() {
    let md = cli(&["yz", "table", "--d1", "-31", "--d2", "-127"]).stdout;
    assert!(md.starts_with("| a | m | m mod 96 |"));
    assert_eq!(md.lines().count(), 33);
    let csv = cli(&["yz", "table", "--d1", "-31", "--d2", "-127", "--format", "csv"]).stdout;
    assert_eq!(csv.lines().count(), 32);
    let latex = cli(&["yz", "table", "--d1", "-31", "--d2", "-127", "--latex"]).stdout;
    assert_eq!(latex, include_str!("../../weber-cm/tests/data/yz_table_31_127.tex"));
    let v = json(&["yz", "table", "--d1", "-31", "--d2", "-127"]);
    assert_eq!(v.as_array().map(|a| a.len()), Some(31));
}

#[test]
fn cache_is_only_an_accelerator() {
    let dir = std::env::temp_dir().join(format!("weber-cm-cli-test-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let dir_s = dir.to_str().unwrap();
    let cases: [&[&str]; 3] = [
        &["yz", "verify", "--d1", "-31", "--d2", "-127"],
        &["gz", "verify", "--d1", "-55", "--d2", "-103"],
        &["classpoly", "--d", "-127"],
    ];
    for args in cases {
        let plain = cli(args);
        let mut cached_args = args.to_vec();
        cached_args.extend(["--cache-dir", dir_s]);
        let cold = cli(&cached_args);
        let warm = cli(&cached_args);
        assert_eq!(plain.stdout, cold.stdout, "{args:?}");
        assert_eq!(plain.stdout, warm.stdout, "{args:?}");
    }
    assert!(std::fs::read_dir(&dir).unwrap().count() > 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn failed_check_exits_with_one() {
    let report = Report {
        command: "yz verify".into(),
        inputs: serde_json::json!({}),
        output: None,
        checks: vec![Check::pass("a"), Check::compare("b", "81".into(), "80".into())],
        elapsed_ms: 0,
    };
    assert_eq!(report.exit_code(), 1);
    let v: Value = serde_json::from_str(&report.render("json".parse().unwrap())).unwrap();
    assert_eq!(v["checks"][1]["status"], "fail");
    assert!(v["checks"][1]["witness"].is_string());
}

#[test]
fn binary_matches_library() {
    let out = Command::new(env!("CARGO_BIN_EXE_weber-cm"))
        .args(["classpoly", "--d", "-31"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), cli(&["classpoly", "--d", "-31"]).stdout);
    let out = Command::new(env!("CARGO_BIN_EXE_weber-cm")).args(["classpoly", "--d", "-10"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
