//! Result serialization: CSV tables and `summary.json`.

use duality_core::Matrix;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

/// `v` rounded to 12 significant digits.
pub fn round12(v: f64) -> f64 {
    let rounded: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        0.0
    } else {
        rounded
    }
}

/// `v` at 12 significant digits in the shortest form that reads back to the
/// rounded value. Zero of either sign prints as `0`.
pub fn format_number(v: f64) -> String {
    let r = round12(v);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r:?}")
    }
}

/// A labelled numeric table ready to be written as CSV.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub corner: String,
    pub col_ids: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl CsvTable {
    pub fn from_matrix(corner: &str, row_ids: &[String], col_ids: &[String], m: &Matrix) -> Self {
        CsvTable {
            corner: corner.to_string(),
            col_ids: col_ids.to_vec(),
            rows: row_ids
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), m.row_vec(i)))
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec![self.corner.clone()];
        header.extend(self.col_ids.iter().cloned());
        w.write_record(&header).expect("in-memory write");
        for (id, values) in &self.rows {
            let mut record = vec![id.clone()];
            record.extend(values.iter().map(|&v| format_number(v)));
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
    }
}

/// `axis1`, `axis2`, ...
pub fn axis_ids(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("axis{i}")).collect()
}

/// `index, eigenvalue, percent_inertia, cumulative_percent`, percentages
/// relative to `total`.
pub fn eigenvalue_table(values: &[f64], total: f64) -> CsvTable {
    let mut cumulative = 0.0;
    let rows = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let percent = if total > 0.0 { 100.0 * v / total } else { 0.0 };
            cumulative += percent;
            ((i + 1).to_string(), vec![v, percent, cumulative])
        })
        .collect();
    CsvTable {
        corner: "index".into(),
        col_ids: vec!["eigenvalue".into(), "percent_inertia".into(), "cumulative_percent".into()],
        rows,
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Dimensions {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableSummary {
    pub label: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub method: String,
    pub dimensions: Dimensions,
    pub tables: Vec<TableSummary>,
    pub total_inertia: f64,
    pub rank: usize,
    pub axes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub response_inertia: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statis_basis: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

impl Summary {
    pub fn to_json(&self) -> String {
        let mut rounded = self.clone();
        rounded.total_inertia = round12(rounded.total_inertia);
        rounded.chi2 = rounded.chi2.map(round12);
        rounded.response_inertia = rounded.response_inertia.map(round12);
        let mut text = serde_json::to_string_pretty(&rounded).expect("summary serializes");
        text.push('\n');
        text
    }
}
