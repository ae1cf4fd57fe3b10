//! Tabular output as CSV or JSON lines with 12 significant digits.

use std::io::Write;

use serde::Deserialize;

use crate::error::{AppError, Result};

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// One JSON object per line.
    #[default]
    Json,
    /// Header row followed by comma separated records.
    Csv,
}

/// One table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Real number, printed with 12 significant digits.
    Num(f64),
    /// Integer.
    Int(u64),
    /// Boolean.
    Bool(bool),
    /// Free text.
    Text(String),
    /// Missing value, printed as `NA`.
    Na,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Na, Cell::Num)
    }
}

/// Format `v` with 12 significant digits, in positional notation unless the
/// magnitude is extreme.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_owned();
    }
    if !v.is_finite() {
        return if v.is_nan() { "NaN".to_owned() } else if v > 0.0 { "inf".to_owned() } else { "-inf".to_owned() };
    }
    // Round first so that the exponent reflects the printed value.
    let sci = format!("{v:.11e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if !(-4..15).contains(&exp) {
        return sci;
    }
    let decimals = (11 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Column names plus rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Column names.
    pub columns: Vec<&'static str>,
    /// Rows, each as long as `columns`.
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    /// Empty table with the given header.
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    /// Append a row.
    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Serialize in the requested format.
    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json_lines(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let fail = |e: csv::Error| AppError::usage(format!("writing CSV: {e}"));
        w.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_text)).map_err(fail)?;
        }
        w.flush().map_err(|e| AppError::usage(format!("writing CSV: {e}")))
    }

    fn write_json_lines(&self, out: &mut dyn Write) -> Result<()> {
        for row in &self.rows {
            let fields: Vec<String> = self
                .columns
                .iter()
                .zip(row)
                .map(|(k, v)| format!("{}:{}", json_string(k), json_value(v)))
                .collect();
            writeln!(out, "{{{}}}", fields.join(","))
                .map_err(|e| AppError::usage(format!("writing output: {e}")))?;
        }
        Ok(())
    }
}

fn csv_text(c: &Cell) -> String {
    match c {
        Cell::Num(v) => format_number(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Na => "NA".to_owned(),
    }
}

fn json_string(s: &str) -> String {
    serde_json::Value::String(s.to_owned()).to_string()
}

fn json_value(c: &Cell) -> String {
    match c {
        Cell::Num(v) if v.is_finite() => format_number(*v),
        Cell::Num(_) => "null".to_owned(),
        Cell::Int(v) => v.to_string(),
        Cell::Bool(v) => v.to_string(),
        Cell::Text(s) => json_string(s),
        Cell::Na => json_string("NA"),
    }
}
