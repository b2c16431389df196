//! JSON and CSV rendering with deterministic byte output.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{Map, Value};

use crate::config::Format;

/// Rebuilds every object with keys in sorted order.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(
                entries
                    .into_iter()
                    .map(|(k, v)| (k, canonical(v)))
                    .collect::<Map<_, _>>(),
            )
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn to_json(v: &Value) -> String {
    let mut s =
        serde_json::to_string_pretty(&canonical(v.clone())).expect("values always serialize");
    s.push('\n');
    s
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Flattens nested objects into dotted keys; arrays become compact JSON.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            for k in keys {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, &map[k], out);
            }
        }
        Value::Array(_) => out.push((prefix.to_string(), canonical(v.clone()).to_string())),
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// One row per element for an array of objects, otherwise a single row.
/// The header is the union of flattened keys in first-seen order.
pub fn to_csv(v: &Value) -> Result<String> {
    let rows: Vec<Vec<(String, String)>> = match v {
        Value::Array(items) => items
            .iter()
            .map(|item| {
                let mut row = Vec::new();
                flatten("", item, &mut row);
                row
            })
            .collect(),
        other => {
            let mut row = Vec::new();
            flatten("", other, &mut row);
            vec![row]
        }
    };
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let fixed: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            header
                .iter()
                .map(|h| {
                    row.iter()
                        .find(|(k, _)| k == h)
                        .map(|(_, v)| v.clone())
                        .unwrap_or_default()
                })
                .collect()
        })
        .collect();
    table_csv(&header, &fixed)
}

pub fn table_csv(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn render(v: &Value, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(to_json(v)),
        Format::Csv => to_csv(v),
    }
}

/// Writes to `out`, or stdout when absent.
pub fn write_output(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
