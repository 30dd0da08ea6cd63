//! Report envelope and its JSON / CSV renderings.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "nlapprox.report/1";
pub const ERROR_SCHEMA: &str = "nlapprox.error/1";

#[derive(Debug, Serialize)]
pub struct ReportEnvelope {
    pub schema: &'static str,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub results: Value,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ErrorReport<'a> {
    pub schema: &'static str,
    pub command: &'a str,
    pub error: ErrorBody<'a>,
    pub tool_version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody<'a> {
    pub kind: &'a str,
    pub message: String,
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report values serialize");
    s.push('\n');
    s
}

/// One `path,value` row per JSON leaf; array indices and object keys are
/// joined with `.`. Numbers are rendered by the JSON serializer, so each CSV
/// value is textually identical to the JSON one.
pub fn to_csv<T: Serialize>(value: &T) -> String {
    let tree = serde_json::to_value(value).expect("report values serialize");
    let mut rows = Vec::new();
    flatten(&tree, String::new(), &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["path", "value"]).expect("in-memory write");
    for (path, value) in rows {
        w.write_record([path, value]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn flatten(v: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                flatten(child, join(k), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(child, join(&i.to_string()), out);
            }
        }
        Value::String(s) => out.push((path, s.clone())),
        other => out.push((path, other.to_string())),
    }
}
