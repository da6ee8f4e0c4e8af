use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Number, Value as Json};
use thiserror::Error;

use crate::run::{ResultRow, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `json` for a `.json` path, CSV otherwise.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("no rows to write")]
    Empty,
    #[error("rows disagree on columns at row {0}")]
    Ragged(usize),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// 17 significant digits, enough to round-trip any double.
fn real_text(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Real(x) => real_text(*x),
        Value::Int(i) => i.to_string(),
        Value::Text(s) => s.clone(),
        Value::Bool(b) => b.to_string(),
    }
}

fn cell_json(v: &Value) -> Json {
    match v {
        Value::Real(x) => Number::from_f64(*x).map_or_else(|| Json::String(x.to_string()), Json::Number),
        Value::Int(i) => Json::Number((*i).into()),
        Value::Text(s) => Json::String(s.clone()),
        Value::Bool(b) => Json::Bool(*b),
    }
}

fn check_shape(rows: &[ResultRow]) -> Result<(), EmitError> {
    let first = rows.first().ok_or(EmitError::Empty)?;
    for (i, r) in rows.iter().enumerate() {
        let same = r.columns.len() == first.columns.len()
            && r.columns.iter().zip(&first.columns).all(|(a, b)| a.0 == b.0);
        if !same {
            return Err(EmitError::Ragged(i));
        }
    }
    Ok(())
}

/// Serializes rows. CSV has a header and LF line endings; JSON is an array
/// of flat objects whose keys keep column order. Non-finite reals become
/// `NaN`, `inf` or `-inf` (as strings in JSON).
pub fn render(rows: &[ResultRow], format: Format) -> Result<String, EmitError> {
    check_shape(rows)?;
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(rows[0].columns.iter().map(|(n, _)| n.as_str()))?;
            for r in rows {
                w.write_record(r.columns.iter().map(|(_, v)| cell_text(v)))?;
            }
            let bytes = w.into_inner().map_err(|e| EmitError::Csv(e.into_error().into()))?;
            Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
        }
        Format::Json => {
            let array: Vec<Json> = rows
                .iter()
                .map(|r| {
                    let obj: Map<String, Json> = r.columns.iter().map(|(n, v)| (n.clone(), cell_json(v))).collect();
                    Json::Object(obj)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&array)?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes rows to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[ResultRow], format: Format, path: Option<&Path>) -> Result<(), EmitError> {
    let text = render(rows, format)?;
    match path {
        Some(p) => fs::write(p, text).map_err(|source| EmitError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| EmitError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// A parsed output row: column names with their textual values.
pub type TextRow = Vec<(String, String)>;

pub fn parse_csv(text: &str) -> Result<Vec<TextRow>, EmitError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    r.records()
        .map(|rec| Ok(header.iter().cloned().zip(rec?.iter().map(str::to_string)).collect()))
        .collect()
}

pub fn parse_json(text: &str) -> Result<Vec<TextRow>, EmitError> {
    let rows: Vec<Map<String, Json>> = serde_json::from_str(text)?;
    Ok(rows
        .into_iter()
        .map(|obj| {
            obj.into_iter()
                .map(|(k, v)| {
                    let s = match v {
                        Json::String(s) => s,
                        other => other.to_string(),
                    };
                    (k, s)
                })
                .collect()
        })
        .collect())
}
