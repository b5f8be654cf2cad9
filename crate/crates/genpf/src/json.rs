//! Instance JSON: reading and writing systems.
//!
//! Two equivalent input forms are accepted:
//!
//! ```json
//! { "n": 2, "m": 3, "gains": [[1, -2, 0], [-1, 0, 1]] }
//! ```
//!
//! with positive entries as supporter gains and negative as repressor
//! gains, or the split form
//!
//! ```json
//! { "supporter_gains": [[...]], "repressor_gains": [[...]] }
//! ```
//!
//! Entries are JSON numbers or exact-rational strings such as `"1/2"`.

use num::traits::Signed;
use serde_json::{json, Map, Value};

use crate::numeric::{format_rational, parse_rational, rat_from_f64, rat_to_f64, roundtrips_f64, Rat};
use crate::system::GainSystem;
use crate::{Error, Result};

/// Parses an instance document in either form.
pub fn system_from_json(text: &str) -> Result<GainSystem> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    system_from_value(&value)
}

pub fn system_from_value(value: &Value) -> Result<GainSystem> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("instance must be a JSON object".into()))?;
    if let Some(gains) = obj.get("gains") {
        let rows = rational_rows(gains, "gains")?;
        let system = GainSystem::from_signed(rows)?;
        check_declared_dims(obj, &system)?;
        Ok(system)
    } else if obj.contains_key("supporter_gains") && obj.contains_key("repressor_gains") {
        let sup = rational_rows(&obj["supporter_gains"], "supporter_gains")?;
        let rep = rational_rows(&obj["repressor_gains"], "repressor_gains")?;
        let system = GainSystem::from_split(sup, rep)?;
        check_declared_dims(obj, &system)?;
        Ok(system)
    } else {
        Err(Error::Parse(
            "instance needs either \"gains\" or both \"supporter_gains\" and \"repressor_gains\""
                .into(),
        ))
    }
}

fn check_declared_dims(obj: &Map<String, Value>, system: &GainSystem) -> Result<()> {
    for (key, actual) in [("n", system.entities()), ("m", system.affectors())] {
        if let Some(v) = obj.get(key) {
            let declared = v
                .as_u64()
                .ok_or_else(|| Error::Parse(format!("\"{key}\" must be a nonnegative integer")))?;
            if declared as usize != actual {
                return Err(Error::Parse(format!(
                    "declared {key} = {declared} but matrix has {actual}"
                )));
            }
        }
    }
    Ok(())
}

fn rational_rows(value: &Value, what: &str) -> Result<Vec<Vec<Rat>>> {
    let rows = value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("\"{what}\" must be an array of rows")))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse(format!("\"{what}\" rows must be arrays")))?
                .iter()
                .map(rational_from_value)
                .collect()
        })
        .collect()
}

/// A JSON number, or a string like `"p/q"`, `"3"` or `"1.5"`.
pub fn rational_from_value(value: &Value) -> Result<Rat> {
    match value {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(i.into()))
            } else if let Some(f) = n.as_f64() {
                rat_from_f64(f)
            } else {
                Err(Error::Parse(format!("unrepresentable number {n}")))
            }
        }
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("expected number or string, got {other}"))),
    }
}

/// Renders a rational as a JSON number when that is lossless, otherwise as
/// a `"p/q"` string.
pub fn rational_to_value(v: &Rat) -> Value {
    if v.denom().abs() == 1.into() {
        if let Some(i) = num::traits::ToPrimitive::to_i64(v.numer()) {
            return json!(i);
        }
    }
    if roundtrips_f64(v) {
        return json!(rat_to_f64(v));
    }
    json!(format_rational(v))
}

/// Serializes a system in the split form with declared dimensions.
pub fn system_to_value(system: &GainSystem) -> Value {
    let matrix = |m: &crate::matrix::RatMatrix| -> Value {
        Value::Array(
            (0..m.rows())
                .map(|i| Value::Array(m.row(i).iter().map(rational_to_value).collect()))
                .collect(),
        )
    };
    json!({
        "n": system.entities(),
        "m": system.affectors(),
        "supporter_gains": matrix(system.supporter_gains()),
        "repressor_gains": matrix(system.repressor_gains()),
    })
}

pub fn system_to_json(system: &GainSystem) -> String {
    serde_json::to_string_pretty(&system_to_value(system)).expect("serializing JSON value")
}
