use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpdMatrix};
use crate::triplet::Triplet;

/// A two-way table of nonnegative integer counts.
///
/// Rows and columns whose margin is zero are dropped on construction; their
/// original indices are kept so callers can report them.
#[derive(Debug, Clone)]
pub struct ContingencyTable {
    counts: Matrix,
    total: f64,
    kept_rows: Vec<usize>,
    kept_cols: Vec<usize>,
    shape: (usize, usize),
}

impl ContingencyTable {
    pub fn from_counts(rows: usize, cols: usize, counts: &[u64]) -> Result<Self> {
        let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        Self::from_matrix(&Matrix::from_row_slice(rows, cols, &values)?)
    }

    /// Accepts a matrix whose entries are nonnegative integers.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let value = m[(i, j)];
                if value < 0.0 || value.fract() != 0.0 {
                    return Err(Error::InvalidCount { row: i, col: j, value });
                }
            }
        }
        let kept_rows: Vec<usize> = (0..m.rows()).filter(|&i| m.row(i).sum() > 0.0).collect();
        let kept_cols: Vec<usize> = (0..m.cols()).filter(|&j| m.column(j).sum() > 0.0).collect();
        let total = m.sum();
        if total == 0.0 {
            return Err(Error::DegenerateTable { rows: 0, cols: 0 });
        }
        let counts = m.select_rows(&kept_rows).select_columns(&kept_cols);
        Ok(ContingencyTable {
            counts: Matrix::checked(counts)?,
            total,
            kept_rows,
            kept_cols,
            shape: (m.rows(), m.cols()),
        })
    }

    /// Counts after dropping zero-margin rows and columns.
    pub fn counts(&self) -> &Matrix {
        &self.counts
    }

    /// The grand total `m`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn kept_rows(&self) -> &[usize] {
        &self.kept_rows
    }

    pub fn kept_cols(&self) -> &[usize] {
        &self.kept_cols
    }

    pub fn dropped_rows(&self) -> Vec<usize> {
        (0..self.shape.0).filter(|i| !self.kept_rows.contains(i)).collect()
    }

    pub fn dropped_cols(&self) -> Vec<usize> {
        (0..self.shape.1).filter(|j| !self.kept_cols.contains(j)).collect()
    }

    fn ensure_analysable(&self) -> Result<()> {
        if self.counts.rows() < 2 || self.counts.cols() < 2 {
            return Err(Error::DegenerateTable {
                rows: self.counts.rows(),
                cols: self.counts.cols(),
            });
        }
        Ok(())
    }

    fn margins(&self) -> (Vec<f64>, Vec<f64>) {
        let m = self.total;
        let r = self.counts.row_iter().map(|row| row.sum() / m).collect();
        let c = self.counts.column_iter().map(|col| col.sum() / m).collect();
        (r, c)
    }
}

/// The correspondence analysis triplet `(D_r⁻¹·F·D_c⁻¹ − 1, D_c, D_r)` with
/// `F = N/m` and its row and column margins `r`, `c`.
#[derive(Debug, Clone)]
pub struct CaTriplet {
    pub triplet: Triplet,
    pub r: Vec<f64>,
    pub c: Vec<f64>,
}

pub fn ca_triplet(table: &ContingencyTable) -> Result<CaTriplet> {
    table.ensure_analysable()?;
    let (r, c) = table.margins();
    let m = table.total();
    let n = table.counts();
    let x = DMatrix::from_fn(n.rows(), n.cols(), |i, j| n[(i, j)] / m / (r[i] * c[j]) - 1.0);
    let triplet = Triplet::new(
        Matrix::checked(x)?,
        SpdMatrix::diagonal(&c)?,
        SpdMatrix::diagonal(&r)?,
    )?;
    Ok(CaTriplet { triplet, r, c })
}

/// Pearson's χ² statistic against independence, `Σ (O − E)² / E`.
pub fn ca_chi2(table: &ContingencyTable) -> Result<f64> {
    table.ensure_analysable()?;
    let n = table.counts();
    let m = table.total();
    let row_sums: Vec<f64> = n.row_iter().map(|r| r.sum()).collect();
    let col_sums: Vec<f64> = n.column_iter().map(|c| c.sum()).collect();
    let mut chi2 = 0.0;
    for (i, rs) in row_sums.iter().enumerate() {
        for (j, cs) in col_sums.iter().enumerate() {
            let expected = rs * cs / m;
            let diff = n[(i, j)] - expected;
            chi2 += diff * diff / expected;
        }
    }
    Ok(chi2)
}
