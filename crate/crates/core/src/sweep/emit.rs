//! Text output: CSV with `#` metadata lines, or JSON lines whose first
//! record carries the metadata.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.replace([',', '\n', '"'], ";"),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => Value::from(*v),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

/// Seventeen significant digits, which round-trips every f64.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    /// Unit of each column, parallel to `columns`.
    pub units: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Resolved configuration that produced the table.
    pub config: Value,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64().unwrap_or(f64::NAN)).collect())
    }

    fn units_json(&self) -> Value {
        Value::Object(
            self.columns
                .iter()
                .zip(&self.units)
                .map(|(c, u)| (c.clone(), Value::String(u.clone())))
                .collect(),
        )
    }
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn to_csv(table: &Table) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# halfspace-berry {VERSION}");
    let units: Vec<String> = table.columns.iter().zip(&table.units).map(|(c, u)| format!("{c}={u}")).collect();
    let _ = writeln!(out, "# units: {}", units.join(" "));
    let _ = writeln!(out, "# config: {}", table.config);
    let _ = writeln!(out, "{}", table.columns.join(","));
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::csv).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn to_jsonl(table: &Table) -> String {
    let mut out = String::new();
    let meta = json!({
        "version": VERSION,
        "columns": table.columns,
        "units": table.units_json(),
        "config": table.config,
    });
    let _ = writeln!(out, "{meta}");
    for row in &table.rows {
        let record: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
        let _ = writeln!(out, "{}", Value::Object(record));
    }
    out
}

/// Reads a JSON-lines document written by [`to_jsonl`]; `null` becomes NaN.
pub fn from_jsonl(text: &str) -> std::result::Result<Table, String> {
    let mut lines = text.lines();
    let meta: Value = serde_json::from_str(lines.next().ok_or("empty document")?).map_err(|e| e.to_string())?;
    let columns: Vec<String> = serde_json::from_value(meta["columns"].clone()).map_err(|e| e.to_string())?;
    let units = columns
        .iter()
        .map(|c| meta["units"][c].as_str().unwrap_or_default().to_string())
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let record: Map<String, Value> = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let row = columns
            .iter()
            .map(|c| match record.get(c) {
                Some(Value::Number(n)) => Ok(Cell::Num(n.as_f64().unwrap_or(f64::NAN))),
                Some(Value::Null) => Ok(Cell::Num(f64::NAN)),
                Some(Value::Bool(b)) => Ok(Cell::Bool(*b)),
                Some(Value::String(s)) => Ok(Cell::Text(s.clone())),
                _ => Err(format!("missing or malformed column `{c}`")),
            })
            .collect::<std::result::Result<_, String>>()?;
        rows.push(row);
    }
    Ok(Table { columns, units, rows, config: meta["config"].clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl From<super::config::Format> for OutputFormat {
    fn from(f: super::config::Format) -> Self {
        match f {
            super::config::Format::Csv => OutputFormat::Csv,
            super::config::Format::Jsonl => OutputFormat::Jsonl,
        }
    }
}

pub fn render(table: &Table, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(table),
        OutputFormat::Jsonl => to_jsonl(table),
    }
}

/// Writes to `path`, or to standard output when `path` is `None`.
pub fn emit(table: &Table, format: OutputFormat, path: Option<&Path>) -> Result<()> {
    let text = render(table, format);
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| Error::Io { path: p.to_path_buf(), source }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io { path: "<stdout>".into(), source }),
    }
}
