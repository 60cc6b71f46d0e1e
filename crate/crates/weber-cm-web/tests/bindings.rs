use serde_json::Value;
use weber_cm_web::{classpoly_json, yz_table_json, yz_verify_json};

fn parse(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn classpoly_of_minus_31() {
    let v = parse(&classpoly_json(-31, "weber").unwrap());
    assert_eq!(v["polynomial"], "x^3 + x - 1");
    assert_eq!(v["coefficients"], serde_json::json!(["-1", "1", "0", "1"]));
}

#[test]
fn classpoly_rejects_bad_input() {
    assert!(classpoly_json(-10, "weber").is_err());
    assert!(classpoly_json(-31, "modular").is_err());
}

#[test]
fn yz_verify_reports_each_divisor() {
    let v = parse(&yz_verify_json(-31, -127, "all").unwrap());
    let checks = v.as_array().unwrap();
    assert_eq!(checks.len(), 8);
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    let v = parse(&yz_verify_json(-31, -127, "24").unwrap());
    assert_eq!(v[0]["lhs"], "81");
    assert!(yz_verify_json(-31, -127, "5").is_err());
    assert!(yz_verify_json(-31, -31, "all").is_err());
}

#[test]
fn table_has_one_row_per_trace() {
    let v = parse(&yz_table_json(-31, -127).unwrap());
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 31);
    assert_eq!(rows[0]["a"], 1);
    assert_eq!(rows[0]["values"][0]["value"], "3^8");
}
