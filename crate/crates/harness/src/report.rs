//! CSV and JSON emission.
//!
//! Both formats carry the same table. Floats are written as `{:.16e}`
//! (17 significant digits, so they read back bit-for-bit); non-finite values
//! and missing entries become empty CSV fields and JSON `null`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::Format;
use crate::error::Result;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt_float(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Float)
    }

    fn csv_field(&self) -> String {
        match self {
            Cell::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            _ => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Float(v) if v.is_finite() => {
                let raw = RawValue::from_string(format!("{v:.16e}")).map_err(serde::ser::Error::custom)?;
                raw.serialize(s)
            }
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Text(t) => s.serialize_str(t),
            _ => s.serialize_none(),
        }
    }
}

/// Column names plus rows; every row has one cell per column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

struct Row<'a> {
    columns: &'a [&'static str],
    cells: &'a [Cell],
}

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for (c, v) in self.columns.iter().zip(self.cells) {
            map.serialize_entry(c, v)?;
        }
        map.end()
    }
}

#[derive(Serialize)]
struct Document<'a> {
    schema_version: u32,
    command: &'a str,
    seed: u64,
    config: &'a BTreeMap<String, String>,
    rows: Vec<Row<'a>>,
}

/// Everything written to one report.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub table: Table,
}

impl Report {
    /// CSV with `schema_version` and `seed` as leading columns of every row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["schema_version", "seed"];
        header.extend(&self.table.columns);
        w.write_record(&header)?;
        for row in &self.table.rows {
            let mut fields = vec![SCHEMA_VERSION.to_string(), self.seed.to_string()];
            fields.extend(row.iter().map(Cell::csv_field));
            w.write_record(&fields)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let doc = Document {
            schema_version: SCHEMA_VERSION,
            command: &self.command,
            seed: self.seed,
            config: &self.config,
            rows: self.table.rows.iter().map(|cells| Row { columns: &self.table.columns, cells }).collect(),
        };
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    /// Write to `path`, or to standard output when `path` is `None`.
    pub fn emit(&self, path: Option<&Path>, format: Format) -> Result<()> {
        match path {
            Some(p) => {
                let file = std::io::BufWriter::new(std::fs::File::create(p)?);
                self.write(file, format)
            }
            None => self.write(std::io::stdout().lock(), format),
        }
    }
}
