//! Dataset serialization and atomic file output.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::config::{Format, Settings};
use crate::error::CliError;

/// Table of string cells with a fixed header.
pub struct Dataset {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Dataset {
    pub fn new(header: Vec<&'static str>) -> Self {
        Dataset { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn render_csv(data: &Dataset, settings: &Settings) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&data.header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in &data.rows {
        w.write_record(row.iter().map(cell)).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let mut bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(bytes, "# config: {}", settings.provenance()).expect("write to memory");
    Ok(bytes)
}

pub fn render_json(body: Value, settings: &Settings) -> Vec<u8> {
    let config: Map<String, Value> = settings
        .resolved()
        .iter()
        .filter(|(k, _)| k.as_str() != "output" && k.as_str() != "threads")
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let doc = json!({
        "command": settings.command(),
        "config": config,
        "result": body,
    });
    let mut bytes = serde_json::to_vec_pretty(&doc).expect("json value serializes");
    bytes.push(b'\n');
    bytes
}

/// Rows of a dataset as JSON objects keyed by column.
pub fn rows_as_json(data: &Dataset) -> Value {
    Value::Array(
        data.rows
            .iter()
            .map(|row| {
                Value::Object(
                    data.header
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), v.clone()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn render_dataset(data: &Dataset, settings: &Settings, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => render_csv(data, settings),
        Format::Json => Ok(render_json(rows_as_json(data), settings)),
    }
}

/// Writes `bytes` to a temporary file beside `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
