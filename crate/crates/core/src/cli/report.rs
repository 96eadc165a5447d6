//! Run reports and their canonical serialization.
//!
//! Objects are written with sorted keys and every float as `{:.16e}`
//! (17 significant digits), so parsing a report and writing it again gives
//! the same bytes. Non-finite floats become `null`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

pub const FORMAT_VERSION: &str = "magtrace-report/1";

/// Gap between one engine and the reference value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineGap {
    pub engine: String,
    pub value: Option<f64>,
    pub gap: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub format_version: String,
    pub command: Vec<String>,
    pub config: BTreeMap<String, Value>,
    pub results: Value,
    pub gaps: Vec<EngineGap>,
    pub warnings: Vec<String>,
    /// Set when an extrapolation did not settle; the CLI then exits with 3.
    pub non_convergent: bool,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            command,
            config: BTreeMap::new(),
            results: Value::Null,
            gaps: Vec::new(),
            warnings: Vec::new(),
            non_convergent: false,
            wall_time_s: 0.0,
        }
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        Ok(canonical_json(&serde_json::to_value(self)?))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Pretty JSON with sorted keys and fixed float formatting.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => {
                let _ = write!(out, "{i}");
            }
            (_, Some(u), _) => {
                let _ = write!(out, "{u}");
            }
            (_, _, Some(f)) => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(out, depth + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

/// Flattens a JSON value into `path,value` CSV lines.
pub fn flat_csv(v: &Value) -> String {
    let mut out = String::from("key,value\n");
    flatten(&mut out, "", v);
    out
}

fn flatten(out: &mut String, prefix: &str, v: &Value) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(out, &join(&i.to_string()), item);
            }
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for k in keys {
                flatten(out, &join(k), &map[k]);
            }
        }
        Value::String(s) => {
            let _ = writeln!(out, "{prefix},\"{}\"", s.replace('"', "\"\""));
        }
        other => {
            let mut cell = String::new();
            write_value(&mut cell, other, 0);
            let _ = writeln!(out, "{prefix},{cell}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_are_fixed_width() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(f64::NAN), "null");
        let v = json!({"b": 0.1, "a": [1, 2.5e-300, null], "c": "x\"y"});
        let text = canonical_json(&v);
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        let again = canonical_json(&serde_json::from_str(&text).unwrap());
        assert_eq!(text, again);
    }

    #[test]
    fn report_round_trip() {
        let mut r = RunReport::new(vec!["trace".into(), "diag".into()]);
        r.results = json!({"value": 1.0 / 3.0, "count": 3});
        r.config.insert("ell".into(), json!(1.0));
        r.wall_time_s = 0.123;
        let text = r.to_canonical_json().unwrap();
        let parsed = RunReport::from_json(&text).unwrap();
        assert_eq!(parsed, r);
        assert_eq!(parsed.to_canonical_json().unwrap(), text);
    }

    #[test]
    fn csv_flattening() {
        let csv = flat_csv(&json!({"a": {"b": 1.5}, "c": [true]}));
        assert_eq!(csv, "key,value\na.b,1.5000000000000000e0\nc.0,true\n");
    }
}
