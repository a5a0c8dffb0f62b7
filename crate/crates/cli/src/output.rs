use std::io::Write;
use std::path::Path;

use affine_cf::{Error, Result};
use serde_json::{json, Map, Value};

use crate::args::Format;

pub const SCHEMA: &str = "affine-cf v1";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u128),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn float(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

/// A table plus metadata and an optional summary block.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json())
                    .map_err(|e| Error::Evaluation(format!("cannot serialize report: {e}")))?;
                s.push('\n');
                Ok(s.into_bytes())
            }
        }
    }

    fn csv(&self) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        writeln!(out, "# {SCHEMA}")?;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={}", v.csv())?;
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            let err = |e: csv::Error| Error::Evaluation(format!("cannot write CSV: {e}"));
            w.write_record(&self.columns).map_err(err)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::csv)).map_err(err)?;
            }
            w.flush()?;
        }
        for (k, v) in &self.summary {
            writeln!(out, "# summary {k}={}", v.csv())?;
        }
        Ok(out)
    }

    fn json(&self) -> Value {
        let mut root = Map::new();
        root.insert("schema".into(), json!(SCHEMA));
        for (k, v) in &self.meta {
            root.insert(k.clone(), v.json());
        }
        root.insert("columns".into(), json!(self.columns));
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let m: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(r.iter().map(Cell::json))
                    .collect();
                Value::Object(m)
            })
            .collect();
        root.insert("rows".into(), Value::Array(rows));
        if !self.summary.is_empty() {
            let s: Map<String, Value> = self
                .summary
                .iter()
                .map(|(k, v)| (k.clone(), v.json()))
                .collect();
            root.insert("summary".into(), Value::Object(s));
        }
        Value::Object(root)
    }
}

/// Write to `path`, or to standard output.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// `{"error": {"kind", "message", "path"}}`.
pub fn error_json(kind: &str, message: &str, path: Option<&str>) -> String {
    json!({ "error": { "kind": kind, "message": message, "path": path } }).to_string()
}
