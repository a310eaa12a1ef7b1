//! Tabular output shared by every subcommand.
//!
//! CSV: header row, then one record per row, LF line endings. Floats are
//! written as `{:.16e}` (17 significant digits, negative zero as zero), non-finite values as `nan`,
//! `inf` or `-inf`, absent values as empty fields.
//!
//! JSON: an array of objects whose keys follow the column order. Floats use
//! the shortest representation that round-trips; non-finite values become
//! `null`.

use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::args::{Format, OutputArgs};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{:.16e}", v + 0.0)
    }
}

impl Cell {
    fn csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json_value(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v + 0.0).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_field))?;
        }
        w.into_inner().map_err(|e| CliError::io("csv buffer", e.into_error()))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = String::from("[");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(if i == 0 { "\n  {" } else { ",\n  {" });
            for (j, (col, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::from(col.as_str()).to_string());
                out.push_str(": ");
                out.push_str(&cell.json_value().to_string());
            }
            out.push('}');
        }
        out.push_str(if self.rows.is_empty() { "]\n" } else { "\n]\n" });
        out.into_bytes()
    }

    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }
}

pub fn write_bytes(bytes: &[u8], path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::io(p.display(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| CliError::io("stdout", e))
        }
    }
}

pub fn emit(table: &Table, output: &OutputArgs) -> CliResult<()> {
    write_bytes(&table.render(output.format)?, output.out.as_deref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["l", "E", "note"]);
        t.push(vec![0.into(), 0.1.into(), "a,b".into()]);
        t.push(vec![1.into(), f64::NAN.into(), Cell::Empty]);
        t
    }

    #[test]
    fn csv_layout() {
        let text = String::from_utf8(sample().to_csv().unwrap()).unwrap();
        assert_eq!(text, "l,E,note\n0,1.0000000000000001e-1,\"a,b\"\n1,nan,\n");
    }

    #[test]
    fn json_keeps_column_order_and_round_trips() {
        let bytes = sample().to_json();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.find("\"l\"").unwrap() < text.find("\"E\"").unwrap());
        let v: Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v[0]["E"].as_f64(), Some(0.1));
        assert!(v[1]["E"].is_null());
        assert_eq!(v[0]["note"], "a,b");
    }

    #[test]
    fn floats_have_seventeen_significant_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.25), "-2.5000000000000000e-1");
        assert_eq!(format_float(-0.0), "0.0000000000000000e0");
        for v in [std::f64::consts::PI, 1e-300, 123456.789] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn empty_json_table() {
        assert_eq!(Table::new(["x"]).to_json(), b"[]\n");
    }
}
