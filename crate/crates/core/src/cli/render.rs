//! Text rendering. Data values are printed from the same JSON tree the JSON
//! mode emits, so both modes carry identical numbers.

use serde_json::Value;

use super::Outcome;

pub fn text(outcome: &Outcome) -> String {
    let mut out = format!(
        "{} : {}\n",
        outcome.command,
        if outcome.passed { "PASS" } else { "FAIL" }
    );
    for r in &outcome.reports {
        out.push_str(&r.to_text());
    }
    if !outcome.data.is_empty() {
        out.push_str("data\n");
        for (k, v) in &outcome.data {
            value(&mut out, k, v, 1);
        }
    }
    out
}

fn value(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) if !is_matrix(v) => {
            out.push_str(&format!("{pad}{key}\n"));
            for (k, inner) in map {
                value(out, k, inner, depth + 1);
            }
        }
        Value::Array(items) if items.iter().any(Value::is_object) => {
            out.push_str(&format!("{pad}{key}\n"));
            for (i, inner) in items.iter().enumerate() {
                value(out, &format!("[{i}]"), inner, depth + 1);
            }
        }
        Value::String(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
        other => out.push_str(&format!("{pad}{key}: {other}\n")),
    }
}

/// Matrix JSON objects are kept on one line.
fn is_matrix(v: &Value) -> bool {
    v.get("dim").is_some() && v.get("data").is_some() && v.as_object().is_some_and(|m| m.len() == 2)
}
