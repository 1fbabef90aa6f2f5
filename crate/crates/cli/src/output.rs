use serde_json::Value;

use crate::config::OutputFormat;
use crate::report::Report;

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), "-".into())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `columns`/`rows` tables, as produced by sweeps.
fn tabular(results: &Value) -> Option<(Vec<String>, Vec<Vec<String>>)> {
    let cols = results.get("columns")?.as_array()?;
    let rows = results.get("rows")?.as_array()?;
    let header = cols.iter().map(cell).collect();
    let body = rows
        .iter()
        .filter_map(|r| r.as_array().map(|r| r.iter().map(cell).collect()))
        .collect();
    Some((header, body))
}

fn csv(report: &Report) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    match tabular(&report.results) {
        Some((header, rows)) => {
            w.write_record(&header).expect("in-memory write");
            for r in rows {
                w.write_record(&r).expect("in-memory write");
            }
        }
        None => {
            w.write_record(["key", "value"]).expect("in-memory write");
            let mut kv = Vec::new();
            flatten("", &report.results, &mut kv);
            for (k, v) in kv {
                w.write_record([k, v]).expect("in-memory write");
            }
        }
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

fn table(report: &Report) -> String {
    let mut kv = vec![
        ("command".to_string(), report.command.clone()),
        (
            "status".to_string(),
            format!("{:?}", report.status).to_lowercase(),
        ),
        ("inputs_digest".to_string(), report.inputs_digest.clone()),
    ];
    if let Some(e) = &report.error {
        kv.push(("error".into(), format!("{}: {}", e.kind, e.message)));
    }
    for w in &report.warnings {
        kv.push(("warning".into(), w.clone()));
    }
    let mut out = String::new();
    if let Some((header, rows)) = tabular(&report.results) {
        let width = kv.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &kv {
            out.push_str(&format!("{k:<width$}  {v}\n"));
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|i| {
                rows.iter()
                    .map(|r| r[i].len())
                    .chain([header[i].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                + "\n"
        };
        out.push_str(&line(&header));
        for r in &rows {
            out.push_str(&line(r));
        }
        return out;
    }
    flatten("", &report.results, &mut kv);
    let width = kv.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    for (k, v) in kv {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

pub fn render(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => table(report),
        OutputFormat::Record => report.to_json() + "\n",
        OutputFormat::Csv => csv(report),
    }
}
