//! Analysis dispatch: load inputs, run one method, collect result files and
//! write them once everything has succeeded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use duality_core::triplet::RANK_TOL;
use duality_core::{
    ca_chi2, ca_triplet, center_columns, coefficient_matrices, column_coordinates, interstructure,
    pca_triplet, pcaiv, principal_components, statis, sym_eigen, uniform_weights, ContingencyTable,
    DiagramCollection, Matrix, SpdMatrix, StatisBasis, Triplet,
};
use log::{debug, info, warn};

use crate::error::CliError;
use crate::output::{axis_ids, eigenvalue_table, CsvTable, Dimensions, Summary, TableSummary, SCHEMA_VERSION};
use crate::plot;
use crate::table::{load_table, load_weights, TableFile, TableKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    /// Centered PCA with the identity column metric.
    #[value(name = "pca")]
    Pca,
    /// PCA on standardized columns (correlation matrix).
    #[value(name = "pca_std")]
    PcaStd,
    /// Correspondence analysis of a count table.
    #[value(name = "ca")]
    Ca,
    /// PCA on instrumental variables: explanatory table, then response table.
    #[value(name = "pcaiv")]
    Pcaiv,
    /// RV and COVV matrices between tables.
    #[value(name = "rv")]
    Rv,
    /// STATIS compromise of several tables.
    #[value(name = "statis")]
    Statis,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pca => "pca",
            Method::PcaStd => "pca_std",
            Method::Ca => "ca",
            Method::Pcaiv => "pcaiv",
            Method::Rv => "rv",
            Method::Statis => "statis",
        }
    }

    fn check_arity(self, found: usize) -> Result<(), CliError> {
        let (ok, expected) = match self {
            Method::Pca | Method::PcaStd | Method::Ca => (found == 1, "exactly 1"),
            Method::Pcaiv => (found == 2, "exactly 2"),
            Method::Rv | Method::Statis => (found >= 2, "at least 2"),
        };
        if ok {
            Ok(())
        } else {
            Err(CliError::InputArity {
                method: self.name(),
                expected,
                found,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub method: Method,
    pub inputs: Vec<PathBuf>,
    pub weights: Option<PathBuf>,
    /// Number of axes to report; defaults to the full rank.
    pub rank: Option<usize>,
    pub statis_basis: StatisBasis,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
    /// Recorded in the summary; no analysis is randomized.
    pub seed: Option<u64>,
}

impl AnalysisConfig {
    pub fn new(method: Method, inputs: Vec<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            method,
            inputs,
            weights: None,
            rank: None,
            statis_basis: StatisBasis::default(),
            output_dir: output_dir.into(),
            emit_plots: false,
            seed: None,
        }
    }
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Summary,
    /// Paths of every written file, sorted.
    pub files: Vec<PathBuf>,
}

struct Report<'a> {
    config: &'a AnalysisConfig,
    files: BTreeMap<String, String>,
    warnings: Vec<String>,
    tables: Vec<TableSummary>,
    dimensions: Dimensions,
    values: Vec<f64>,
    total: f64,
    rank: usize,
    axes: usize,
    chi2: Option<f64>,
    response_inertia: Option<f64>,
}

impl<'a> Report<'a> {
    fn new(config: &'a AnalysisConfig) -> Self {
        Report {
            config,
            files: BTreeMap::new(),
            warnings: Vec::new(),
            tables: Vec::new(),
            dimensions: Dimensions { rows: 0, cols: 0 },
            values: Vec::new(),
            total: 0.0,
            rank: 0,
            axes: 0,
            chi2: None,
            response_inertia: None,
        }
    }

    fn warn(&mut self, message: String) {
        warn!("{message}");
        self.warnings.push(message);
    }

    fn table(&mut self, label: &str, t: &TableFile) {
        self.tables.push(TableSummary {
            label: label.to_string(),
            rows: t.rows(),
            cols: t.cols(),
        });
    }

    fn csv(&mut self, name: &str, table: CsvTable) {
        self.files.insert(name.to_string(), table.to_csv());
    }

    fn matrix(&mut self, name: &str, row_ids: &[String], m: &Matrix) {
        self.csv(name, CsvTable::from_matrix("id", row_ids, &axis_ids(m.cols()), m));
    }

    fn svg(&mut self, name: &str, contents: String) {
        if self.config.emit_plots {
            self.files.insert(name.to_string(), contents);
        }
    }

    /// Records the retained spectrum and writes `eigenvalues.csv` (and the
    /// scree plot).
    fn spectrum(&mut self, values: &[f64], total: f64, axes: usize) {
        if values.is_empty() {
            self.warn("all eigenvalues are zero; nothing to project".into());
        }
        self.values = values.to_vec();
        self.total = total;
        self.rank = values.len();
        self.axes = axes;
        self.csv("eigenvalues.csv", eigenvalue_table(values, total));
        self.svg("scree.svg", plot::scree(values));
    }

    fn axis_label(&self, values: &[f64], total: f64, k: usize) -> String {
        let percent = if total > 0.0 { 100.0 * values[k] / total } else { 0.0 };
        format!("Axis {} ({percent:.1}%)", k + 1)
    }

    /// Rows on the first two axes; skipped with a warning below rank 2.
    fn factor_map(&mut self, row_ids: &[String], scores: Option<Matrix>) {
        if !self.config.emit_plots {
            return;
        }
        match scores {
            Some(s) if s.cols() >= 2 => {
                let points = points(row_ids, &s);
                let svg = plot::scatter(
                    "Factor map",
                    &self.axis_label(&self.values, self.total, 0),
                    &self.axis_label(&self.values, self.total, 1),
                    &points,
                );
                self.svg("factor_map.svg", svg);
            }
            _ => self.warn(format!("factor map skipped: rank {} is below 2", self.rank)),
        }
    }

    fn write(self) -> Result<RunReport, CliError> {
        let dir = &self.config.output_dir;
        let mut names: Vec<String> = self.files.keys().cloned().collect();
        names.push("summary.json".into());
        names.sort();
        let summary = Summary {
            schema_version: SCHEMA_VERSION,
            method: self.config.method.name().to_string(),
            dimensions: self.dimensions,
            tables: self.tables,
            total_inertia: self.total,
            rank: self.rank,
            axes: self.axes,
            chi2: self.chi2,
            response_inertia: self.response_inertia,
            statis_basis: match self.config.method {
                Method::Rv | Method::Statis => Some(basis_name(self.config.statis_basis).to_string()),
                _ => None,
            },
            seed: self.config.seed,
            files: names.clone(),
            warnings: self.warnings,
        };
        let io = |path: &Path, e: std::io::Error| CliError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let mut contents = self.files;
        contents.insert("summary.json".into(), summary.to_json());
        let mut files = Vec::new();
        for (name, text) in &contents {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| io(&path, e))?;
            debug!("wrote {}", path.display());
            files.push(path);
        }
        Ok(RunReport { summary, files })
    }
}

fn basis_name(b: StatisBasis) -> &'static str {
    match b {
        StatisBasis::Covv => "covv",
        StatisBasis::Rv => "rv",
    }
}

fn points(ids: &[String], m: &Matrix) -> Vec<(String, f64, f64)> {
    ids.iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), m[(i, 0)], if m.cols() > 1 { m[(i, 1)] } else { 0.0 }))
        .collect()
}

fn axes(requested: Option<usize>, rank: usize) -> Result<usize, CliError> {
    match requested {
        Some(k) if k > rank => Err(duality_core::Error::RankExceeded {
            requested: k,
            available: rank,
        }
        .into()),
        Some(k) => Ok(k),
        None => Ok(rank),
    }
}

/// File stems, made unique by suffixing `_2`, `_3`, ... to repeats.
fn labels(paths: &[PathBuf]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for p in paths {
        let stem = p
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "table".into());
        let mut label = stem.clone();
        let mut n = 2;
        while out.contains(&label) {
            label = format!("{stem}_{n}");
            n += 1;
        }
        out.push(label);
    }
    out
}

fn row_weights(config: &AnalysisConfig, row_ids: &[String]) -> Result<Vec<f64>, CliError> {
    match &config.weights {
        Some(path) => load_weights(path, row_ids),
        None => Ok(uniform_weights(row_ids.len())),
    }
}

pub fn run(config: &AnalysisConfig) -> Result<RunReport, CliError> {
    config.method.check_arity(config.inputs.len())?;
    info!("running {} on {} table(s)", config.method.name(), config.inputs.len());
    let mut report = Report::new(config);
    match config.method {
        Method::Pca => run_pca(&mut report, false)?,
        Method::PcaStd => run_pca(&mut report, true)?,
        Method::Ca => run_ca(&mut report)?,
        Method::Pcaiv => run_pcaiv(&mut report)?,
        Method::Rv => run_rv(&mut report)?,
        Method::Statis => run_statis(&mut report)?,
    }
    report.write()
}

/// Shared tail of the single-table methods.
fn ordinate(report: &mut Report, t: &Triplet, row_ids: &[String], col_ids: &[String]) -> Result<(), CliError> {
    let e = t.diagram_eigen()?;
    let k = axes(report.config.rank, e.rank)?;
    report.dimensions = Dimensions {
        rows: t.rows(),
        cols: t.cols(),
    };
    report.spectrum(&e.values[..e.rank], t.total_inertia(), k);
    report.matrix("row_scores.csv", row_ids, &principal_components(t, &e, k)?);
    report.matrix("col_loadings.csv", col_ids, &column_coordinates(&e, k)?);
    let map = if e.rank >= 2 {
        Some(principal_components(t, &e, 2)?)
    } else {
        None
    };
    report.factor_map(row_ids, map);
    Ok(())
}

fn run_pca(report: &mut Report, standardize: bool) -> Result<(), CliError> {
    let path = &report.config.inputs[0];
    let table = load_table(path, TableKind::Continuous)?;
    report.table(&labels(&report.config.inputs)[0], &table);
    let weights = row_weights(report.config, &table.row_ids)?;
    let t = pca_triplet(&table.values, &weights, standardize)?;
    ordinate(report, &t, &table.row_ids, &table.col_ids)
}

fn run_ca(report: &mut Report) -> Result<(), CliError> {
    let path = &report.config.inputs[0];
    let table = load_table(path, TableKind::Counts)?;
    report.table(&labels(&report.config.inputs)[0], &table);
    if report.config.weights.is_some() {
        report.warn("row weights are ignored by ca; the row margins are used".into());
    }
    let counts = ContingencyTable::from_matrix(&table.values)?;
    for i in counts.dropped_rows() {
        report.warn(format!("dropped row '{}' with zero margin", table.row_ids[i]));
    }
    for j in counts.dropped_cols() {
        report.warn(format!("dropped column '{}' with zero margin", table.col_ids[j]));
    }
    let row_ids: Vec<String> = counts.kept_rows().iter().map(|&i| table.row_ids[i].clone()).collect();
    let col_ids: Vec<String> = counts.kept_cols().iter().map(|&j| table.col_ids[j].clone()).collect();
    let ca = ca_triplet(&counts)?;
    report.chi2 = Some(ca_chi2(&counts)?);
    ordinate(report, &ca.triplet, &row_ids, &col_ids)
}

fn run_pcaiv(report: &mut Report) -> Result<(), CliError> {
    let inputs = &report.config.inputs;
    let names = labels(inputs);
    let x_table = load_table(&inputs[0], TableKind::Continuous)?;
    let y_table = load_table(&inputs[1], TableKind::Continuous)?;
    report.table(&names[0], &x_table);
    report.table(&names[1], &y_table);
    let row_ids = x_table.row_ids.clone();
    let y_raw = y_table.aligned_to(&row_ids, &inputs[1])?;
    let weights = row_weights(report.config, &row_ids)?;
    let d = SpdMatrix::diagonal(&weights)?;
    let x = center_columns(&x_table.values, &d)?;
    let y = center_columns(&y_raw, &d)?;
    let q = SpdMatrix::identity(y.cols());

    let probe = pcaiv(&x, &y, &q, &d, 0)?;
    let full = pcaiv(&x, &y, &q, &d, probe.r_rank)?;
    let rank = full.eigen.rank;
    let k = axes(report.config.rank, rank)?;
    let res = if k == rank { full.clone() } else { pcaiv(&x, &y, &q, &d, k)? };

    report.dimensions = Dimensions {
        rows: x.rows(),
        cols: x.cols() + y.cols(),
    };
    report.response_inertia = Some(Triplet::new(y, q, d)?.total_inertia());
    let values = full.eigen.values[..rank].to_vec();
    report.spectrum(&values, values.iter().sum(), k);
    report.matrix("row_scores.csv", &row_ids, &res.row_scores());
    report.matrix("col_loadings.csv", &x_table.col_ids, &res.betas());
    let map = (rank >= 2).then(|| full.row_scores());
    report.factor_map(&row_ids, map);
    Ok(())
}

struct Studies {
    collection: DiagramCollection,
    row_ids: Vec<String>,
}

fn load_studies(report: &mut Report) -> Result<Studies, CliError> {
    let inputs = &report.config.inputs;
    let names = labels(inputs);
    let mut tables = Vec::new();
    for (path, name) in inputs.iter().zip(&names) {
        let t = load_table(path, TableKind::Continuous)?;
        report.table(name, &t);
        tables.push(t);
    }
    let row_ids = tables[0].row_ids.clone();
    let weights = row_weights(report.config, &row_ids)?;
    let mut triplets = Vec::new();
    for (t, path) in tables.iter().zip(inputs) {
        let x = t.aligned_to(&row_ids, path)?;
        triplets.push(pca_triplet(&x, &weights, false)?);
    }
    report.dimensions = Dimensions {
        rows: row_ids.len(),
        cols: tables.iter().map(TableFile::cols).sum(),
    };
    Ok(Studies {
        collection: DiagramCollection::new(triplets, names)?,
        row_ids,
    })
}

fn write_coefficients(report: &mut Report, labels: &[String], covv: &Matrix, rv: &Matrix) {
    report.csv("rv_matrix.csv", CsvTable::from_matrix("id", labels, labels, rv));
    report.csv("covv_matrix.csv", CsvTable::from_matrix("id", labels, labels, covv));
    let rows: Vec<Vec<f64>> = (0..rv.rows()).map(|i| rv.row_vec(i)).collect();
    report.svg("rv_heatmap.svg", plot::heatmap("RV coefficients", labels, &rows));
}

/// Study coordinates on the basis matrix (`study_coordinates.csv`) and the
/// interstructure map on its first two axes.
fn write_interstructure(report: &mut Report, labels: &[String], basis: &Matrix, axes: usize) -> Result<(), CliError> {
    let coords = interstructure(basis, axes)?;
    report.matrix("study_coordinates.csv", labels, &coords);
    if report.config.emit_plots {
        let e = sym_eigen(basis)?;
        let values: Vec<f64> = e.values.iter().map(|v| v.max(0.0)).collect();
        let total: f64 = values.iter().sum();
        let map = interstructure(basis, 2)?;
        let svg = plot::scatter(
            "Interstructure",
            &report.axis_label(&values, total, 0),
            &report.axis_label(&values, total, 1),
            &points(labels, &map),
        );
        report.svg("interstructure.svg", svg);
    }
    Ok(())
}

fn basis_matrix(basis: StatisBasis, covv: Matrix, rv: Matrix) -> Matrix {
    match basis {
        StatisBasis::Covv => covv,
        StatisBasis::Rv => rv,
    }
}

fn run_rv(report: &mut Report) -> Result<(), CliError> {
    let studies = load_studies(report)?;
    let labels = studies.collection.labels().to_vec();
    let (c, r) = coefficient_matrices(&studies.collection)?;
    write_coefficients(report, &labels, &c, &r);
    let basis = basis_matrix(report.config.statis_basis, c, r);
    let e = sym_eigen(&basis)?;
    let values: Vec<f64> = e.values.iter().map(|v| v.max(0.0)).collect();
    let top = values[0];
    let rank = values.iter().filter(|&&v| top > 0.0 && v > RANK_TOL * top).count();
    let k = axes(report.config.rank, rank)?;
    let total = values.iter().sum();
    report.spectrum(&values[..rank], total, k);
    write_interstructure(report, &labels, &basis, k)
}

fn run_statis(report: &mut Report) -> Result<(), CliError> {
    let studies = load_studies(report)?;
    let labels = studies.collection.labels().to_vec();
    let res = statis(&studies.collection, report.config.statis_basis)?;
    write_coefficients(report, &labels, &res.covv_matrix, &res.rv_matrix);
    let weights = CsvTable {
        corner: "study".into(),
        col_ids: vec!["weight".into(), "rv_with_compromise".into()],
        rows: labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), vec![res.weights[i], res.distances_to_compromise[i]]))
            .collect(),
    };
    report.csv("statis_weights.csv", weights);

    let ce = &res.compromise_eigen;
    let k = axes(report.config.rank, ce.rank)?;
    report.spectrum(&ce.values[..ce.rank], ce.total(), k);
    report.matrix("row_scores.csv", &studies.row_ids, &ce.scores(k)?);
    let map = if ce.rank >= 2 { Some(ce.scores(2)?) } else { None };
    report.factor_map(&studies.row_ids, map);
    let basis = basis_matrix(res.basis, res.covv_matrix.clone(), res.rv_matrix.clone());
    write_interstructure(report, &labels, &basis, labels.len().min(2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_unique() {
        let paths: Vec<PathBuf> = ["a/t.csv", "b/t.csv", "u.csv", "t.csv"].iter().map(PathBuf::from).collect();
        assert_eq!(labels(&paths), ["t", "t_2", "u", "t_3"]);
    }

    #[test]
    fn arity() {
        assert!(Method::Pca.check_arity(1).is_ok());
        assert!(Method::Pca.check_arity(2).is_err());
        assert!(Method::Pcaiv.check_arity(2).is_ok());
        assert!(Method::Pcaiv.check_arity(3).is_err());
        assert!(Method::Statis.check_arity(1).is_err());
        assert!(Method::Rv.check_arity(4).is_ok());
    }

    #[test]
    fn requested_axes() {
        assert_eq!(axes(None, 3).unwrap(), 3);
        assert_eq!(axes(Some(2), 3).unwrap(), 2);
        assert_eq!(axes(Some(4), 3).unwrap_err().name(), "RankExceeded");
    }
}
