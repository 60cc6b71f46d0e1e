//! WebAssembly bindings for the browser demo in `www/`. Each export returns
//! a JSON string; the plain `*_json` functions carry the logic so they can
//! be tested natively.

use serde_json::json;
use wasm_bindgen::prelude::*;
use weber_cm::arith::{DiscriminantPair, DIVISORS_24};
use weber_cm::classpoly::{class_polynomial_kind, PolyCache, PolyKind};
use weber_cm::yzlocal::{table_json, yz_checks, yz_table};

fn admissible(d1: i64, d2: i64) -> Result<DiscriminantPair, String> {
    let pair = DiscriminantPair::new(d1, d2).map_err(|e| e.to_string())?;
    pair.require_admissible().map_err(|e| e.to_string())?;
    Ok(pair)
}

/// `{"polynomial", "coefficients"}` with coefficients ascending as decimal strings.
pub fn classpoly_json(d: i64, kind: &str) -> Result<String, String> {
    let kind: PolyKind = kind.parse().map_err(|e: weber_cm::Error| e.to_string())?;
    let p = class_polynomial_kind(d, kind).map_err(|e| e.to_string())?;
    let coeffs: Vec<String> = p.coeffs().iter().map(|c| c.to_string()).collect();
    Ok(json!({"d": d, "kind": kind.name(), "polynomial": p.to_string(), "coefficients": coeffs}).to_string())
}

/// One entry per s with both sides of the factorization.
pub fn yz_verify_json(d1: i64, d2: i64, s: &str) -> Result<String, String> {
    let pair = admissible(d1, d2)?;
    let s_list = if s == "all" {
        DIVISORS_24.to_vec()
    } else {
        match s.parse::<u64>() {
            Ok(v) if v > 0 && 24 % v == 0 => vec![v],
            _ => return Err(format!("{s} is not a divisor of 24")),
        }
    };
    let checks = yz_checks(&pair, &s_list, &PolyCache::disabled()).map_err(|e| e.to_string())?;
    serde_json::to_string(&checks).map_err(|e| e.to_string())
}

/// Rows of the F(m/k^2) table as produced by the CLI's JSON table format.
pub fn yz_table_json(d1: i64, d2: i64) -> Result<String, String> {
    Ok(table_json(&yz_table(&admissible(d1, d2)?)))
}

#[wasm_bindgen]
pub fn classpoly(d: i32, kind: &str) -> Result<String, JsError> {
    classpoly_json(d.into(), kind).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn yz_verify(d1: i32, d2: i32, s: &str) -> Result<String, JsError> {
    yz_verify_json(d1.into(), d2.into(), s).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn yz_table_rows(d1: i32, d2: i32) -> Result<String, JsError> {
    yz_table_json(d1.into(), d2.into()).map_err(|e| JsError::new(&e))
}
