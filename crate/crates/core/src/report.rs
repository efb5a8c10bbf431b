//! Experiment reports: config echo, named tables, verdicts, and their CSV
//! and JSON renderings.
//!
//! Reports are value types built once and never mutated; rendering the same
//! report twice yields identical bytes. Reals in CSV are printed with 17
//! significant digits so a re-parse recovers the exact f64. Every CSV starts
//! with `#`-prefixed metadata lines echoing the full effective configuration
//! including the master seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A typed configuration value echoed into reports and file headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    UInt(u64),
    Real(f64),
    RealList(Vec<f64>),
    Str(String),
}

impl ParamValue {
    pub fn as_u64(&self) -> Result<u64> {
        match self {
            ParamValue::UInt(v) => Ok(*v),
            ParamValue::Int(v) if *v >= 0 => Ok(*v as u64),
            other => Err(Error::data(format!("expected unsigned integer, got {other:?}"))),
        }
    }

    pub fn as_f64(&self) -> Result<f64> {
        match self {
            ParamValue::Real(v) => Ok(*v),
            ParamValue::Int(v) => Ok(*v as f64),
            ParamValue::UInt(v) => Ok(*v as f64),
            other => Err(Error::data(format!("expected real, got {other:?}"))),
        }
    }

    pub fn as_f64_list(&self) -> Result<Vec<f64>> {
        match self {
            ParamValue::RealList(v) => Ok(v.clone()),
            other => Err(Error::data(format!("expected real list, got {other:?}"))),
        }
    }

    pub fn as_str(&self) -> Result<&str> {
        match self {
            ParamValue::Str(s) => Ok(s),
            other => Err(Error::data(format!("expected string, got {other:?}"))),
        }
    }

    fn render(&self) -> String {
        match self {
            ParamValue::Int(v) => v.to_string(),
            ParamValue::UInt(v) => v.to_string(),
            ParamValue::Real(v) => format_real(*v),
            ParamValue::RealList(v) => v
                .iter()
                .map(|x| format_real(*x))
                .collect::<Vec<_>>()
                .join(";"),
            ParamValue::Str(s) => s.clone(),
        }
    }
}

/// Ordered configuration echo.
pub type Config = BTreeMap<String, ParamValue>;

/// One table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Str(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_real(*v),
            Cell::Str(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Result<f64> {
        match self {
            Cell::Num(v) => Ok(*v),
            Cell::Int(v) => Ok(*v as f64),
            other => Err(Error::data(format!("expected numeric cell, got {other:?}"))),
        }
    }
}

/// 17 significant digits: round-trip exact for f64.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// A named rectangular table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::data(format!("table {} has no column {name}", self.name)))
    }

    /// Numeric accessor by row index and column name.
    pub fn num(&self, row: usize, column: &str) -> Result<f64> {
        let c = self.column_index(column)?;
        self.rows
            .get(row)
            .ok_or_else(|| Error::data(format!("table {} has no row {row}", self.name)))?[c]
            .as_f64()
    }

    /// All values of a numeric column.
    pub fn num_column(&self, column: &str) -> Result<Vec<f64>> {
        let c = self.column_index(column)?;
        self.rows.iter().map(|r| r[c].as_f64()).collect()
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

/// One checked claim inside a report. The pass flag is always derivable from
/// the report's tables; `reference` states the quantitative fact the check
/// rests on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub reference: String,
    pub pass: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(claim: &str, reference: &str, pass: bool, detail: String) -> Self {
        Verdict {
            claim: claim.to_string(),
            reference: reference.to_string(),
            pass,
            detail,
        }
    }
}

/// A named, seeded, fully reproducible experiment record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub config: Config,
    pub tables: Vec<Table>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentReport {
    pub fn table(&self, name: &str) -> Result<&Table> {
        self.tables
            .iter()
            .find(|t| t.name == name)
            .ok_or_else(|| Error::data(format!("report {} has no table {name}", self.name)))
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Deterministic JSON envelope.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// Renders one table as CSV with `#` metadata lines carrying the config.
    pub fn table_csv(&self, table: &Table) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# experiment={}", self.name);
        let _ = writeln!(out, "# table={}", table.name);
        for (k, v) in &self.config {
            let _ = writeln!(out, "# {k}={}", v.render());
        }
        let _ = writeln!(out, "{}", table.columns.join(","));
        for row in &table.rows {
            let line: Vec<String> = row.iter().map(|c| c.render()).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    /// All CSV renderings, named `<experiment>-<table>.csv`.
    pub fn csv_files(&self) -> Vec<(String, String)> {
        self.tables
            .iter()
            .map(|t| (format!("{}-{}.csv", self.name, t.name), self.table_csv(t)))
            .collect()
    }
}
