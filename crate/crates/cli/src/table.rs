//! CSV ingestion.
//!
//! Tables are UTF-8, comma separated, with a header row of column ids and a
//! first column of row ids. The header's first cell is conventionally blank
//! or `id` but any label is accepted, so result files load back too.

use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::{Path, PathBuf};

use duality_core::{Error as CoreError, Matrix};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Continuous,
    /// Nonnegative integer counts.
    Counts,
}

#[derive(Debug, Clone)]
pub struct TableFile {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub values: Matrix,
    pub kind: TableKind,
}

impl TableFile {
    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    /// Rows reordered to follow `order`, which must hold exactly this
    /// table's row ids.
    pub fn aligned_to(&self, order: &[String], path: &Path) -> Result<Matrix, CliError> {
        let index = row_positions(&self.row_ids, order, path)?;
        let mut out = Vec::with_capacity(order.len() * self.cols());
        for &i in &index {
            out.extend(self.values.row_vec(i));
        }
        Ok(Matrix::from_row_slice(order.len(), self.cols(), &out)?)
    }
}

fn row_positions(ids: &[String], order: &[String], path: &Path) -> Result<Vec<usize>, CliError> {
    let mismatch = |message: String| CliError::RowIdMismatch {
        path: path.to_path_buf(),
        message,
    };
    if ids.len() != order.len() {
        return Err(mismatch(format!(
            "has {} rows, expected {}",
            ids.len(),
            order.len()
        )));
    }
    order
        .iter()
        .map(|id| {
            ids.iter()
                .position(|x| x == id)
                .ok_or_else(|| mismatch(format!("row id '{id}' is missing")))
        })
        .collect()
}

pub fn load_table(path: &Path, kind: TableKind) -> Result<TableFile, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    read_table(file, path, kind)
}

/// Parses a table from any reader; `path` is only used in error messages.
pub fn read_table<R: Read>(reader: R, path: &Path, kind: TableKind) -> Result<TableFile, CliError> {
    let path = path.to_path_buf();
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let parse_error = |line: u64, column: usize, message: String| CliError::Parse {
        path: path.clone(),
        line,
        column,
        message,
    };

    let header = match records.next() {
        Some(r) => r.map_err(|e| csv_error(&path, e))?,
        None => return Err(parse_error(1, 1, "missing header row".into())),
    };
    let header_line = header.position().map_or(1, |p| p.line());
    if header.len() < 2 {
        return Err(parse_error(header_line, 1, "no data columns".into()));
    }
    let col_ids: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    check_ids(&col_ids, "column", &path, |j| parse_error(header_line, j + 2, "empty column id".into()))?;

    let width = header.len();
    let mut row_ids = Vec::new();
    let mut values = Vec::new();
    for record in records {
        let record = record.map_err(|e| csv_error(&path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != width {
            return Err(parse_error(
                line,
                record.len().min(width) + 1,
                format!("expected {width} fields, found {}", record.len()),
            ));
        }
        row_ids.push(record[0].to_string());
        for (j, cell) in record.iter().enumerate().skip(1) {
            values.push(parse_cell(cell, kind, &path, line, j + 1)?);
        }
    }
    if row_ids.is_empty() {
        return Err(parse_error(header_line + 1, 1, "no data rows".into()));
    }
    check_ids(&row_ids, "row", &path, |i| {
        parse_error(header_line + 1 + i as u64, 1, "empty row id".into())
    })?;
    let values = Matrix::from_row_slice(row_ids.len(), col_ids.len(), &values)?;
    Ok(TableFile {
        row_ids,
        col_ids,
        values,
        kind,
    })
}

fn check_ids(
    ids: &[String],
    axis: &'static str,
    path: &Path,
    empty: impl Fn(usize) -> CliError,
) -> Result<(), CliError> {
    let mut seen = HashSet::new();
    for (i, id) in ids.iter().enumerate() {
        if id.is_empty() {
            return Err(empty(i));
        }
        if !seen.insert(id.as_str()) {
            return Err(CliError::DuplicateId {
                path: path.to_path_buf(),
                axis,
                id: id.clone(),
            });
        }
    }
    Ok(())
}

fn parse_cell(cell: &str, kind: TableKind, path: &Path, line: u64, column: usize) -> Result<f64, CliError> {
    let value: f64 = cell.parse().map_err(|_| CliError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: format!("cannot read '{cell}' as a number"),
    })?;
    if !value.is_finite() {
        return Err(CliError::NonFiniteValue {
            path: path.to_path_buf(),
            line,
            column,
            value: cell.to_string(),
        });
    }
    if kind == TableKind::Counts && (value < 0.0 || value.fract() != 0.0) {
        return Err(CliError::NonIntegerCount {
            path: path.to_path_buf(),
            line,
            column,
            value: cell.to_string(),
        });
    }
    Ok(value)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map_or(0, |p| p.line());
    let column = match e.kind() {
        csv::ErrorKind::Utf8 { err, .. } => err.field() + 1,
        _ => 0,
    };
    match e.kind() {
        csv::ErrorKind::Io(_) => CliError::Io {
            path: PathBuf::from(path),
            message: e.to_string(),
        },
        _ => CliError::Parse {
            path: PathBuf::from(path),
            line,
            column,
            message: e.to_string(),
        },
    }
}

/// Reads a one-column row-weight file, aligns it to `row_ids` and rescales it
/// to sum to one.
pub fn load_weights(path: &Path, row_ids: &[String]) -> Result<Vec<f64>, CliError> {
    let table = load_table(path, TableKind::Continuous)?;
    if table.cols() != 1 {
        return Err(CliError::Parse {
            path: path.to_path_buf(),
            line: 1,
            column: 3,
            message: format!("weight file needs exactly one value column, found {}", table.cols()),
        });
    }
    let raw = table.aligned_to(row_ids, path)?.column_vec(0);
    if let Some((i, w)) = raw.iter().enumerate().find(|(_, w)| **w <= 0.0) {
        return Err(CoreError::BadWeights(format!("weight for row '{}' is {w}, must be positive", row_ids[i])).into());
    }
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|w| w / total).collect())
}
