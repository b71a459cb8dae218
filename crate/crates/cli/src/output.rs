//! Deterministic table rendering: identical configs must produce
//! bit-identical files, so every number uses the shortest round-trip
//! representation, rows keep grid order, and no timestamps are written.

use std::path::PathBuf;

use serde_json::Value;

use crate::config::Ctx;
use crate::{Failure, RunResult};

pub(crate) const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub(crate) enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub(crate) enum Cell {
    Num(f64),
    Text(&'static str),
}

/// One output file: a column-labeled grid plus free-form header notes.
#[derive(Debug)]
pub(crate) struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub notes: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            notes: Vec::new(),
            rows: Vec::new(),
        }
    }
}

/// Shortest round-trip decimal: positional and scientific are both exact,
/// take whichever is shorter (positional on ties, so grid values stay plain).
pub(crate) fn fmt_num(x: f64) -> String {
    let plain = format!("{x}");
    let sci = format!("{x:e}");
    if sci.len() < plain.len() {
        sci
    } else {
        plain
    }
}

pub(crate) fn write_tables(ctx: &Ctx, tables: Vec<Table>) -> RunResult<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(tables.len());
    for table in tables {
        let ext = match ctx.format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = ctx.out_dir.join(format!("{}.{ext}", table.name));
        let body = match ctx.format {
            Format::Csv => render_csv(ctx, &table),
            Format::Json => render_json(ctx, &table)?,
        };
        std::fs::write(&path, body).map_err(|e| {
            Failure::Validation(format!("cannot write {}: {e}", path.display()))
        })?;
        written.push(path);
    }
    Ok(written)
}

fn render_csv(ctx: &Ctx, table: &Table) -> String {
    let mut s = String::new();
    s.push_str(&format!("# qpinem {TOOL_VERSION}\n"));
    s.push_str(&format!("# config sha256 {}\n", ctx.config_sha256));
    s.push_str(&format!("# config {}\n", ctx.config_echo));
    for (key, value) in &table.notes {
        s.push_str(&format!("# {key} {value}\n"));
    }
    s.push_str(&table.columns.join(","));
    s.push('\n');
    for row in &table.rows {
        let mut first = true;
        for cell in row {
            if !first {
                s.push(',');
            }
            first = false;
            match cell {
                Cell::Num(x) => s.push_str(&fmt_num(*x)),
                Cell::Text(t) => s.push_str(t),
            }
        }
        s.push('\n');
    }
    s
}

fn render_json(ctx: &Ctx, table: &Table) -> RunResult<String> {
    let config: Value = serde_json::from_str(&ctx.config_echo)
        .map_err(|e| Failure::Validation(format!("config echo is not JSON: {e}")))?;
    let notes: Vec<Value> = table
        .notes
        .iter()
        .map(|(k, v)| Value::Array(vec![k.as_str().into(), v.as_str().into()]))
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|cell| match cell {
                        // non-finite values have no JSON number, they render null
                        Cell::Num(x) => Value::from(*x),
                        Cell::Text(t) => Value::from(*t),
                    })
                    .collect(),
            )
        })
        .collect();
    let mut root = serde_json::Map::new();
    root.insert("tool".into(), "qpinem".into());
    root.insert("version".into(), TOOL_VERSION.into());
    root.insert("config_sha256".into(), ctx.config_sha256.as_str().into());
    root.insert("config".into(), config);
    root.insert("notes".into(), Value::Array(notes));
    root.insert("columns".into(), table.columns.iter().map(|c| c.as_str()).collect());
    root.insert("rows".into(), Value::Array(rows));
    let body = serde_json::to_string_pretty(&Value::Object(root))
        .map_err(|e| Failure::Validation(format!("cannot render JSON: {e}")))?;
    Ok(body + "\n")
}
