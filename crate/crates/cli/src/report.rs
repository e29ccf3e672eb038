//! Tabular reports and their CSV/JSON encodings.

use std::io::Write;

use serde_json::{Map, Value as Json};

use crate::error::{CliError, CliResult};
use crate::scenario::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
}

impl Value {
    /// CSV cell: reals in scientific notation with 17 significant digits.
    pub fn to_csv(&self) -> String {
        match self {
            Value::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Value::Num(v) => format!("{v}"),
            Value::Int(v) => v.to_string(),
            Value::Text(t) => t.clone(),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Num(v) => serde_json::Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Int(v) => Json::from(*v),
            Value::Text(t) => Json::from(t.clone()),
            Value::Bool(b) => Json::from(*b),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

/// One report row as ordered `(column, value)` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Row {
    pub cells: Vec<(String, Value)>,
}

impl Row {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, column: &str, value: impl Into<Value>) -> Self {
        self.cells.push((column.to_string(), value.into()));
        self
    }

    pub fn push(&mut self, column: &str, value: impl Into<Value>) {
        self.cells.push((column.to_string(), value.into()));
    }

    pub fn get(&self, column: &str) -> Option<&Value> {
        self.cells.iter().find(|(c, _)| c == column).map(|(_, v)| v)
    }

    pub fn columns(&self) -> Vec<String> {
        self.cells.iter().map(|(c, _)| c.clone()).collect()
    }

    /// `false` only for rows that carry a failed `pass` column.
    pub fn passed(&self) -> bool {
        !matches!(self.get("pass"), Some(Value::Bool(false)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(columns: Vec<String>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) -> CliResult<()> {
        if row.columns() != self.columns {
            return Err(CliError::Config(format!(
                "row columns {:?} do not match the report schema {:?}",
                row.columns(),
                self.columns
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn any_breach(&self) -> bool {
        self.rows.iter().any(|r| !r.passed())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.cells.iter().map(|(_, v)| v.to_csv()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> CliResult<()> {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let map: Map<String, Json> = r.cells.iter().map(|(c, v)| (c.clone(), v.to_json())).collect();
                Json::Object(map)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("columns".into(), Json::from(self.columns.clone()));
        doc.insert("rows".into(), Json::Array(rows));
        serde_json::to_writer_pretty(&mut out, &Json::Object(doc))?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> CliResult<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    pub fn to_string(&self, format: Format) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write(&mut buf, format)?;
        Ok(String::from_utf8(buf).expect("reports are UTF-8"))
    }
}
