//! The JSON matrix interchange format.
//!
//! A matrix document is `{"n": <dim>, "entries": [[[a, b, k], ...], ...]}`,
//! row-major, where the triple `[a, b, k]` denotes the entry
//! `(a + bi) / γ^k` with `γ = 1 + i`. Integers are arbitrary precision.
//! Loading re-canonicalizes every entry and rejects non-unitary matrices.
//!
//! Human inputs with power-of-two denominators can be converted with
//! `DyadicGauss::from_half_power`, using `1/2^m = i^m/γ^(2m)`.

use digauss::{DyadicGauss, GaussInt, UMat};
use num_bigint::BigInt;
use serde_json::{Number, Value};
use std::str::FromStr;

fn integer_from_value(v: &Value, what: &str) -> Result<BigInt, String> {
    let num = v
        .as_number()
        .ok_or_else(|| format!("{what}: expected an integer"))?;
    let text = num.to_string();
    if text.contains(['.', 'e', 'E']) {
        return Err(format!("{what}: expected an integer, got {text}"));
    }
    BigInt::from_str(&text).map_err(|e| format!("{what}: {e}"))
}

fn entry_from_value(v: &Value, what: &str) -> Result<DyadicGauss, String> {
    let triple = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| format!("{what}: expected an [a, b, k] triple"))?;
    let a = integer_from_value(&triple[0], what)?;
    let b = integer_from_value(&triple[1], what)?;
    let k = triple[2]
        .as_u64()
        .ok_or_else(|| format!("{what}: denominator exponent must be a natural number"))?;
    let k = u32::try_from(k).map_err(|_| format!("{what}: denominator exponent too large"))?;
    Ok(DyadicGauss::new(GaussInt::new(a, b), k))
}

/// Parses and validates a matrix document; the matrix must be unitary.
pub fn parse_matrix(text: &str) -> Result<UMat, String> {
    let value: Value = serde_json::from_str(text).map_err(|e| format!("invalid JSON: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| "expected a JSON object".to_string())?;
    let n = obj
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| "missing or invalid \"n\"".to_string())? as usize;
    if n == 0 {
        return Err("dimension must be at least 1".to_string());
    }
    let rows_value = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| "missing or invalid \"entries\"".to_string())?;
    if rows_value.len() != n {
        return Err(format!("expected {n} rows, found {}", rows_value.len()));
    }
    let mut rows = Vec::with_capacity(n);
    for (r, row_value) in rows_value.iter().enumerate() {
        let row_array = row_value
            .as_array()
            .filter(|a| a.len() == n)
            .ok_or_else(|| format!("row {r}: expected {n} entries"))?;
        let mut row = Vec::with_capacity(n);
        for (c, entry) in row_array.iter().enumerate() {
            row.push(entry_from_value(entry, &format!("entry ({r},{c})"))?);
        }
        rows.push(row);
    }
    let m = UMat::from_rows(rows).map_err(|e| e.to_string())?;
    if !m.is_unitary() {
        return Err("matrix is not unitary".to_string());
    }
    Ok(m)
}

fn number_from_bigint(x: &BigInt) -> Value {
    Value::Number(Number::from_str(&x.to_string()).expect("integer literal"))
}

/// Serializes a matrix as a document; entries are already canonical.
pub fn matrix_to_json(m: &UMat) -> String {
    let mut rows = Vec::with_capacity(m.n());
    for r in 0..m.n() {
        let mut row = Vec::with_capacity(m.n());
        for c in 0..m.n() {
            let e = m.entry(r, c);
            row.push(Value::Array(vec![
                number_from_bigint(e.num().re()),
                number_from_bigint(e.num().im()),
                Value::Number(Number::from(e.lde())),
            ]));
        }
        rows.push(Value::Array(row));
    }
    let doc = serde_json::json!({
        "n": m.n(),
        "entries": Value::Array(rows),
    });
    serde_json::to_string_pretty(&doc).expect("serializable document")
}
