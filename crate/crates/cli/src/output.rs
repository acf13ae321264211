//! Tabular output in CSV or JSON.

use std::io::Write;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

/// Bumped whenever a column is renamed, removed or reinterpreted.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precision {
    /// Significant digits.
    Digits(usize),
    /// Shortest representation that round-trips.
    Full,
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "full" {
            return Ok(Precision::Full);
        }
        match s.parse::<usize>() {
            Ok(d) if (1..=17).contains(&d) => Ok(Precision::Digits(d)),
            _ => Err(format!(
                "expected 'full' or a digit count in 1..=17, got {s:?}"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    /// Computed value, printed at the requested precision.
    Num(f64),
    /// Input value, always printed in full (infinity as `inf`).
    Exact(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self, precision: Precision) -> String {
        match self {
            Cell::Num(v) => format_number(*v, precision),
            Cell::Exact(v) => format_number(*v, Precision::Full),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self, precision: Precision) -> Value {
        match self {
            Cell::Num(v) | Cell::Exact(v) if !v.is_finite() => {
                Value::String(format_number(*v, Precision::Full))
            }
            Cell::Num(_) | Cell::Exact(_) => {
                let text = self.render(precision);
                let parsed: f64 = text.parse().expect("formatted numbers parse back");
                json!(parsed)
            }
            Cell::Int(i) => json!(i),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<tmode_core::Dof> for Cell {
    fn from(nu: tmode_core::Dof) -> Self {
        Cell::Exact(nu.as_f64())
    }
}

/// Formats `v` with `digits` significant digits: fixed notation for
/// magnitudes in `[1e-5, 1e15)`, scientific otherwise.
pub fn format_number(v: f64, precision: Precision) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let digits = match precision {
        Precision::Full => return format!("{v}"),
        Precision::Digits(d) => d,
    };
    if v == 0.0 {
        return "0".into();
    }
    // Round first so that e.g. 9.9999996 is classified by its rounded exponent.
    let rounded: f64 = format!("{:.*e}", digits - 1, v)
        .parse()
        .expect("valid float");
    let exponent = rounded.abs().log10().floor() as i32;
    if (-5..15).contains(&exponent) {
        let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
        format!("{rounded:.decimals$}")
    } else {
        format!("{:.*e}", digits - 1, v)
    }
}

/// A command's result: fixed column headers and rows of cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, headers: &[&'static str]) -> Self {
        Table {
            command,
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(
        &self,
        out: W,
        format: Format,
        precision: Precision,
    ) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out, precision),
            Format::Json => self.write_json(out, precision),
        }
    }

    fn write_csv<W: Write>(&self, out: W, precision: Precision) -> std::io::Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        writer.write_record(&self.headers)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|c| c.render(precision)))?;
        }
        writer.flush()
    }

    fn write_json<W: Write>(&self, mut out: W, precision: Precision) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), c.to_json(precision)))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        out.write_all(b"\n")
    }
}
