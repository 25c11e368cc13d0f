//! Plain-text rendering. Verify reports get a column table; everything
//! else is flattened to `path  value` lines.

use serde_json::Value;

pub fn render(v: &Value) -> String {
    let mut out = String::new();
    if let Some(checks) = v.get("checks").and_then(Value::as_array) {
        let mut head = v.clone();
        if let Some(obj) = head.as_object_mut() {
            obj.remove("checks");
        }
        flatten("", &head, &mut out);
        out.push('\n');
        out.push_str(&check_table(checks));
    } else {
        flatten("", v, &mut out);
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object()) => {
            let s: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{prefix:<40} [{}]\n", s.join(", ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push_str(&format!("{prefix:<40} {}\n", scalar(other))),
    }
}

fn check_table(checks: &[Value]) -> String {
    let cols = ["id", "pass", "count", "failures", "boundary", "max_residual", "threshold"];
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| cols.iter().map(|k| c.get(*k).map(scalar).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = (0..cols.len())
        .map(|i| rows.iter().map(|r| r[i].len()).chain([cols[i].len()]).max().unwrap_or(0))
        .collect();
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(cols.iter().map(|s| s.to_string()).collect());
    for r in rows {
        out.push_str(&line(r));
    }
    out
}
