//! Tabular reports and their JSON / CSV encodings.
//!
//! Both encodings are produced from the same [`Table`], so they carry the same
//! values: rationals as `"p/q"` strings, floats in shortest round-trip form.

use std::io::Write;

use pareto_records::rational::format_rational;
use pareto_records::ExactRational;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Rational(ExactRational),
    Text(String),
    Null,
}

impl Cell {
    pub fn rational(r: &ExactRational) -> Self {
        Cell::Rational(r.clone())
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(v) => json!(v.to_string()),
            Cell::Rational(r) => json!(format_rational(r)),
            Cell::Text(s) => json!(s),
            Cell::Null => Value::Null,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => v.to_string(),
            Cell::Rational(r) => format_rational(r),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Null, Cell::Float)
    }
}

impl From<Option<&ExactRational>> for Cell {
    fn from(v: Option<&ExactRational>) -> Self {
        v.map_or(Cell::Null, Cell::rational)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.to_string(), v.to_json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Run metadata; `timestamp` and `wall_time_s` are the only fields that
/// change between identical invocations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    pub timestamp: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    /// Command-specific parameters and summaries.
    pub params: Map<String, Value>,
}

impl Meta {
    pub fn new(command: &'static str) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed: None,
            generator: None,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            wall_time_s: None,
            params: Map::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.params.insert(
            key.to_string(),
            serde_json::to_value(value).expect("parameter serializes"),
        );
        self
    }
}

/// Whether a report's rows are a table of results or a probability table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Body {
    Rows,
    Pmf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Meta,
    pub body: Body,
    pub table: Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Report {
    pub fn to_json(&self) -> Value {
        let key = match self.body {
            Body::Rows => "rows",
            Body::Pmf => "pmf",
        };
        let mut obj = Map::new();
        obj.insert(
            "meta".into(),
            serde_json::to_value(&self.meta).expect("meta serializes"),
        );
        obj.insert(key.into(), self.table.json_rows());
        Value::Object(obj)
    }

    pub fn meta_json(&self) -> Value {
        serde_json::to_value(&self.meta).expect("meta serializes")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.table.columns).map_err(CliError::io)?;
        for row in &self.table.rows {
            w.write_record(row.iter().map(Cell::to_csv)).map_err(CliError::io)?;
        }
        w.flush().map_err(CliError::io)
    }

    pub fn write<W: Write>(&self, format: Format, mut out: W) -> Result<(), CliError> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json()).map_err(CliError::io)?;
                writeln!(out).map_err(CliError::io)
            }
            Format::Csv => self.write_csv(out),
        }
    }

    pub fn render(&self, format: Format) -> String {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8 output")
    }
}
