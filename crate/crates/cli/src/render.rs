//! Plain-text view of a JSON report.

use serde_json::Value;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Object(m) if m.is_empty() => Some("{}".into()),
        _ => None,
    }
}

/// Arrays nested at most two deep of scalars print on one line.
fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    let items = v.as_array()?;
    let parts: Option<Vec<String>> = items
        .iter()
        .map(|x| scalar(x).or_else(|| x.as_array().and_then(|_| inline_flat(x))))
        .collect();
    parts.map(|p| format!("[{}]", p.join(", ")))
}

fn inline_flat(v: &Value) -> Option<String> {
    let parts: Option<Vec<String>> = v.as_array()?.iter().map(scalar).collect();
    parts.map(|p| format!("[{}]", p.join(", ")))
}

fn write(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write(out, x, indent + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for x in items {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write(out, x, indent + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

pub fn text(v: &Value) -> String {
    let mut out = String::new();
    write(&mut out, v, 0);
    out
}
