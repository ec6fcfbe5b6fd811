use std::io::Write;

use clap::ValueEnum;
use nalgebra::DMatrix;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Rows for `--format csv`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Structured result of one command.
#[derive(Debug, Clone)]
pub struct Report {
    pub value: Value,
    /// Preferred CSV layout; when absent the JSON is flattened to `key,value` rows.
    pub csv: Option<Table>,
    /// Set when the command completed but its check did not hold.
    pub failure: Option<String>,
}

impl Report {
    pub fn new(value: Value) -> Self {
        Report { value, csv: None, failure: None }
    }

    pub fn with_csv(mut self, t: Table) -> Self {
        self.csv = Some(t);
        self
    }

    pub fn fail_if(mut self, cond: bool, msg: impl Into<String>) -> Self {
        if cond {
            self.failure = Some(msg.into());
        }
        self
    }

    pub fn render(&self, format: Format, out: &mut impl Write) -> CliResult<()> {
        let io = |e: std::io::Error| CliError::Invalid(format!("writing output: {e}"));
        match format {
            Format::Json => {
                let s = serde_json::to_string_pretty(&self.value).expect("serializable");
                writeln!(out, "{s}").map_err(io)
            }
            Format::Table => {
                let mut s = String::new();
                human(&self.value, 0, &mut s);
                out.write_all(s.as_bytes()).map_err(io)
            }
            Format::Csv => {
                let t = self.csv.clone().unwrap_or_else(|| flatten(&self.value));
                let mut w = csv::Writer::from_writer(out);
                if !t.header.is_empty() {
                    w.write_record(&t.header).map_err(|e| CliError::Invalid(e.to_string()))?;
                }
                for r in &t.rows {
                    w.write_record(r).map_err(|e| CliError::Invalid(e.to_string()))?;
                }
                w.flush().map_err(io)
            }
        }
    }
}

/// Rows as nested arrays; 1×1 matrices stay nested so the shape is explicit.
pub fn matrix(m: &DMatrix<f64>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| Value::from(m[(r, c)])).collect()))
            .collect(),
    )
}

pub fn matrix_table(m: &DMatrix<f64>) -> Table {
    Table {
        header: Vec::new(),
        rows: (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)].to_string()).collect())
            .collect(),
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn is_matrix(v: &Value) -> bool {
    match v {
        Value::Array(rows) => {
            !rows.is_empty()
                && rows.iter().all(|r| matches!(r, Value::Array(xs) if xs.iter().all(|x| scalar(x).is_some())))
        }
        _ => false,
    }
}

fn uniform_records(v: &[Value]) -> Option<Vec<String>> {
    let first = v.first()?.as_object()?;
    let keys: Vec<String> = first.keys().cloned().collect();
    let ok = v.iter().all(|r| {
        r.as_object()
            .is_some_and(|o| o.len() == keys.len() && keys.iter().all(|k| o.get(k).and_then(scalar).is_some()))
    });
    ok.then_some(keys)
}

fn pad(rows: &[Vec<String>]) -> Vec<String> {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .map(|(c, s)| format!("{s:>w$}", w = widths[c]))
                .collect::<Vec<_>>()
                .join("  ")
        })
        .collect()
}

fn human(v: &Value, indent: usize, out: &mut String) {
    let ind = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let kw = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (k, x) in map {
                if let Some(s) = scalar(x) {
                    out.push_str(&format!("{ind}{k:<kw$}  {s}\n"));
                } else if let Some(line) = flat_list(x) {
                    out.push_str(&format!("{ind}{k:<kw$}  {line}\n"));
                } else {
                    out.push_str(&format!("{ind}{k}:\n"));
                    human(x, indent + 2, out);
                }
            }
        }
        Value::Array(items) if is_matrix(v) => {
            let rows: Vec<Vec<String>> = items
                .iter()
                .map(|r| r.as_array().unwrap().iter().filter_map(scalar).collect())
                .collect();
            for line in pad(&rows) {
                out.push_str(&format!("{ind}{line}\n"));
            }
        }
        Value::Array(items) => {
            if let Some(keys) = uniform_records(items) {
                let mut rows = vec![keys.clone()];
                rows.extend(items.iter().map(|r| keys.iter().map(|k| scalar(&r[k]).unwrap()).collect()));
                for line in pad(&rows) {
                    out.push_str(&format!("{ind}{line}\n"));
                }
            } else {
                for (i, x) in items.iter().enumerate() {
                    match scalar(x) {
                        Some(s) => out.push_str(&format!("{ind}- {s}\n")),
                        None => {
                            out.push_str(&format!("{ind}[{i}]\n"));
                            human(x, indent + 2, out);
                        }
                    }
                }
            }
        }
        other => out.push_str(&format!("{ind}{}\n", scalar(other).unwrap_or_default())),
    }
}

fn flat_list(v: &Value) -> Option<String> {
    let xs = v.as_array()?;
    let parts: Option<Vec<String>> = xs.iter().map(scalar).collect();
    parts.map(|p| format!("[{}]", p.join(", ")))
}

fn flatten(v: &Value) -> Table {
    fn walk(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    walk(&key, x, rows);
                }
            }
            Value::Array(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, rows);
                }
            }
            other => rows.push(vec![prefix.to_string(), scalar(other).unwrap_or_default()]),
        }
    }
    let mut rows = Vec::new();
    walk("", v, &mut rows);
    Table {
        header: vec!["key".into(), "value".into()],
        rows,
    }
}
