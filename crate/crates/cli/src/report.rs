//! Command reports and their JSON and text renderings.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// The command as written in the script, whitespace-normalized.
    pub command: String,
    #[serde(flatten)]
    pub body: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl Report {
    pub fn new(command: impl Into<String>, body: Map<String, Value>) -> Self {
        Self { command: command.into(), body, timing_ms: None }
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.body.get(key)
    }

    pub fn has_unknown(&self) -> bool {
        contains_unknown(&Value::Object(self.body.clone()))
    }

    /// A witness in this report failed verification, or the fuzz suite failed.
    pub fn has_failure(&self) -> bool {
        contains_failure(&Value::Object(self.body.clone()))
            || self.body.get("failures").and_then(Value::as_array).is_some_and(|f| !f.is_empty())
    }
}

fn contains_unknown(v: &Value) -> bool {
    match v {
        Value::Object(m) => m.get("status").and_then(Value::as_str) == Some("unknown") || m.values().any(contains_unknown),
        Value::Array(a) => a.iter().any(contains_unknown),
        _ => false,
    }
}

fn contains_failure(v: &Value) -> bool {
    match v {
        Value::Object(m) => {
            m.iter().any(|(k, v)| k.ends_with("verified") && *v == Value::Bool(false)) || m.values().any(contains_failure)
        }
        Value::Array(a) => a.iter().any(contains_failure),
        _ => false,
    }
}

/// 0 success, 2 some verdict unknown, 3 failed verification.
pub fn exit_code(reports: &[Report]) -> i32 {
    if reports.iter().any(Report::has_failure) {
        3
    } else if reports.iter().any(Report::has_unknown) {
        2
    } else {
        0
    }
}

pub fn to_json(reports: &[Report]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Object(m) if m.contains_key("kind") => format!("<{}>", scalar(&m["kind"])),
        Value::Object(m) if !m.values().any(|v| v.is_object() || v.is_array()) => fields(m),
        Value::Array(a) if !a.is_empty() && a.iter().all(Value::is_string) => {
            a.iter().map(scalar).collect::<Vec<_>>().join("; ")
        }
        other => {
            let s = other.to_string();
            if s.chars().count() > 72 {
                format!("<{} bytes of json>", s.len())
            } else {
                s
            }
        }
    }
}

fn fields(o: &Map<String, Value>) -> String {
    o.iter().map(|(a, b)| format!("{a}={}", scalar(b))).collect::<Vec<_>>().join(" ")
}

fn certificate_line(c: &Map<String, Value>) -> String {
    let status = c.get("status").map(scalar).unwrap_or_default();
    let kind = |k: &str| c.get(k).and_then(|w| w.get("kind")).and_then(Value::as_str).map(str::to_string);
    let detail = kind("witness")
        .map(|k| format!("witness: {k}"))
        .or_else(|| kind("disproof").map(|k| format!("disproof: {k}")))
        .or_else(|| c.get("cap").and_then(Value::as_str).map(|s| format!("cap: {s}")));
    match detail {
        Some(d) => format!("{status:<8} {d}"),
        None => status,
    }
}

fn is_certificate(v: &Value) -> Option<&Map<String, Value>> {
    v.as_object().filter(|m| m.contains_key("status") && m.contains_key("witness"))
}

fn push_aligned(out: &mut String, indent: &str, rows: &[(String, String)]) {
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    for (k, v) in rows {
        out.push_str(&format!("{indent}{k:<width$}  {v}\n"));
    }
}

/// Aligned `key  value` lines; nested verdict maps are expanded one level.
pub fn to_text(reports: &[Report]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&format!("== {}\n", r.command));
        let mut rows = Vec::new();
        let mut nested = Vec::new();
        for (k, v) in &r.body {
            if let Some(c) = is_certificate(v) {
                rows.push((k.clone(), certificate_line(c)));
            } else if let Some(m) = v.as_object().filter(|m| !m.is_empty() && m.values().all(Value::is_object)) {
                nested.push((k.clone(), m));
            } else if let Some(a) = v.as_array().filter(|a| !a.is_empty() && a.iter().all(Value::is_object)) {
                for (i, x) in a.iter().enumerate() {
                    rows.push((format!("{k}[{i}]"), fields(x.as_object().expect("object"))));
                }
            } else {
                rows.push((k.clone(), scalar(v)));
            }
        }
        if let Some(t) = r.timing_ms {
            rows.push(("timing_ms".into(), t.to_string()));
        }
        push_aligned(&mut out, "  ", &rows);
        for (k, m) in nested {
            out.push_str(&format!("  {k}:\n"));
            let rows: Vec<(String, String)> = m
                .iter()
                .map(|(name, v)| {
                    let line = match is_certificate(v) {
                        Some(c) => certificate_line(c),
                        None => v.as_object().map(fields).unwrap_or_default(),
                    };
                    (name.clone(), line)
                })
                .collect();
            push_aligned(&mut out, "    ", &rows);
        }
    }
    out
}
