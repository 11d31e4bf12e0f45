use std::fs;
use std::path::Path;

use serde::ser::{Serialize, SerializeMap, Serializer};
use xkerr::catgen::WignerGrid;

use crate::config::Format;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
    Empty,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }

    fn csv(&self) -> String {
        match self {
            Cell::F(x) => format!("{x}"),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => u8::from(*b).to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::F(x) if x.is_finite() => s.serialize_f64(*x),
            Cell::F(x) => s.serialize_str(&x.to_string()),
            Cell::I(i) => s.serialize_i64(*i),
            Cell::B(b) => s.serialize_bool(*b),
            Cell::S(v) => s.serialize_str(v),
            Cell::Empty => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

struct Record<'a>(&'a [String], &'a [Cell]);

impl Serialize for Record<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in self.0.iter().zip(self.1) {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl Table {
    pub fn write(&self, path: &Path, format: Format) -> Result<(), CliError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
                w.write_record(&self.header).map_err(|e| csv_err(path, e))?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(|e| csv_err(path, e))?;
                }
                w.flush().map_err(|e| CliError::io(path, e))
            }
            Format::Json => {
                let records: Vec<Record> = self.rows.iter().map(|r| Record(&self.header, r)).collect();
                let text = serde_json::to_string_pretty(&records).expect("table serializes");
                fs::write(path, text).map_err(|e| CliError::io(path, e))
            }
        }
    }
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    CliError::io(path, std::io::Error::other(e))
}

/// Wigner grid as a gnuplot `nonuniform matrix`: the first row holds the
/// column count and the x axis, each later row starts with its p value.
pub fn wigner_matrix(w: &WignerGrid) -> String {
    let mut s = String::new();
    s.push_str(&w.x_axis.len().to_string());
    for x in &w.x_axis {
        s.push_str(&format!(",{x}"));
    }
    s.push('\n');
    for (ip, p) in w.p_axis.iter().enumerate() {
        s.push_str(&format!("{p}"));
        for ix in 0..w.x_axis.len() {
            s.push_str(&format!(",{}", w.values[(ip, ix)]));
        }
        s.push('\n');
    }
    s
}

/// Additional file produced by a point, written after evaluation.
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}
