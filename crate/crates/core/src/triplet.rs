//! The duality diagram `(X, Q, D)`: a data matrix with a column-space metric
//! `Q` and a row-space metric `D`.
//!
//! The two operators of interest are `VQ = XᵀDX·Q` (p×p) and `WD = XQXᵀ·D`
//! (n×n). Both are self-adjoint in their metric and share their nonzero
//! eigenvalues. [`Triplet::diagram_eigen`] diagonalizes the smaller one
//! through the similar symmetric matrix `Q^{1/2}·V·Q^{1/2}` (or
//! `D^{1/2}·W·D^{1/2}`) and transfers the eigenvectors to the other side with
//! `w = XQv/√λ` (or `v = XᵀDw/√λ`).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, Matrix, SpdMatrix, EIG_TOL};

/// Eigenvalues at or below `RANK_TOL·λ₁` count as zero.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct Triplet {
    x: Matrix,
    q: SpdMatrix,
    d: SpdMatrix,
}

/// Eigenstructure of a duality diagram.
///
/// `col_vectors` (p×r) are `Q`-orthonormal eigenvectors of `VQ`;
/// `row_vectors` (n×r) are `D`-orthonormal eigenvectors of `WD`. For every
/// retained `k < rank`, `X·Q·v_k = √λ_k·w_k`. Columns past `rank` span the
/// null spaces and carry eigenvalue zero.
#[derive(Debug, Clone)]
pub struct DiagramEigen {
    pub values: Vec<f64>,
    pub col_vectors: Matrix,
    pub row_vectors: Matrix,
    pub rank: usize,
}

impl DiagramEigen {
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Keeps the leading `k` eigenpairs.
    pub fn truncate(&self, k: usize) -> DiagramEigen {
        let k = k.min(self.values.len());
        DiagramEigen {
            values: self.values[..k].to_vec(),
            col_vectors: Matrix::checked(self.col_vectors.columns(0, k).into_owned())
                .expect("finite"),
            row_vectors: Matrix::checked(self.row_vectors.columns(0, k).into_owned())
                .expect("finite"),
            rank: self.rank.min(k),
        }
    }
}

impl Triplet {
    /// Validates dimensions: `Q` is p×p and `D` is n×n for an n×p `X`.
    pub fn new(x: Matrix, q: SpdMatrix, d: SpdMatrix) -> Result<Self> {
        if q.dim() != x.cols() {
            return Err(Error::DimensionMismatch {
                what: "column metric Q",
                expected: x.cols(),
                found: q.dim(),
            });
        }
        if d.dim() != x.rows() {
            return Err(Error::DimensionMismatch {
                what: "row metric D",
                expected: x.rows(),
                found: d.dim(),
            });
        }
        Ok(Triplet { x, q, d })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn q(&self) -> &SpdMatrix {
        &self.q
    }

    pub fn d(&self) -> &SpdMatrix {
        &self.d
    }

    pub fn rows(&self) -> usize {
        self.x.rows()
    }

    pub fn cols(&self) -> usize {
        self.x.cols()
    }

    /// `V = XᵀDX`.
    pub fn crossprod_v(&self) -> Matrix {
        Matrix::checked(crossprod(&self.x, self.d.matrix())).expect("finite product")
    }

    /// `W = XQXᵀ`. `W·D` is the linear-kernel operator on the rows.
    pub fn gram_w(&self) -> Matrix {
        Matrix::checked(gram(&self.x, self.q.matrix())).expect("finite product")
    }

    /// `tr(VQ) = tr(WD)`, evaluated on the smaller side.
    pub fn total_inertia(&self) -> f64 {
        if self.cols() <= self.rows() {
            trace_of_product(&crossprod(&self.x, self.d.matrix()), self.q.matrix())
        } else {
            trace_of_product(&gram(&self.x, self.q.matrix()), self.d.matrix())
        }
    }

    pub fn diagram_eigen(&self) -> Result<DiagramEigen> {
        decompose(&self.x, ColumnMetric::Definite(&self.q), &self.d)
    }

    /// `X·Q·v_k/√λ_k` for each retained eigenpair of `e`.
    pub fn transfer_row_vectors(&self, e: &DiagramEigen) -> Result<Matrix> {
        if e.rank == 0 {
            return Err(Error::RankMismatch);
        }
        let xq = self.x.as_dmatrix() * self.q.matrix().as_dmatrix();
        let mut out = DMatrix::zeros(self.rows(), e.rank);
        for k in 0..e.rank {
            let lambda = e.values[k];
            assert!(lambda > 0.0, "retained eigenvalue must be positive");
            let w = &xq * e.col_vectors.column(k) / lambda.sqrt();
            out.set_column(k, &w);
        }
        Matrix::checked(out)
    }
}

/// Subtracts the `D`-weighted column means, with weights `D·1 / 1ᵀD1`.
pub fn center_columns(x: &Matrix, d: &SpdMatrix) -> Result<Matrix> {
    if d.dim() != x.rows() {
        return Err(Error::DimensionMismatch {
            what: "row metric D",
            expected: x.rows(),
            found: d.dim(),
        });
    }
    let sums: Vec<f64> = d.matrix().row_iter().map(|r| r.sum()).collect();
    let total: f64 = sums.iter().sum();
    let weights: Vec<f64> = sums.iter().map(|s| s / total).collect();
    Ok(center_with_weights(x, &weights))
}

/// Subtracts the plain column means.
pub fn center_columns_uniform(x: &Matrix) -> Matrix {
    let n = x.rows();
    center_with_weights(x, &vec![1.0 / n as f64; n])
}

pub(crate) fn center_with_weights(x: &Matrix, weights: &[f64]) -> Matrix {
    let mut out = x.as_dmatrix().clone();
    for mut col in out.column_iter_mut() {
        let mean: f64 = col.iter().zip(weights).map(|(v, w)| v * w).sum();
        col.add_scalar_mut(-mean);
    }
    Matrix::checked(out).expect("finite")
}

pub(crate) fn crossprod(x: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    crate::linalg::symmetrize(&(x.transpose() * d * x))
}

pub(crate) fn gram(x: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
    crate::linalg::symmetrize(&(x * q * x.transpose()))
}

/// `tr(A·B)` for symmetric `A`, `B`.
pub(crate) fn trace_of_product(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.component_mul(&b.transpose()).sum()
}

/// Column metric of a diagram. `Semidefinite` carries a precomputed square
/// root and yields only the eigenpairs with nonzero eigenvalue; eigenvalues
/// at or below `RANK_TOL·scale` also count as zero.
pub(crate) enum ColumnMetric<'a> {
    Definite(&'a SpdMatrix),
    Semidefinite {
        q: &'a Matrix,
        sqrt: &'a Matrix,
        scale: f64,
    },
}

impl ColumnMetric<'_> {
    fn matrix(&self) -> &DMatrix<f64> {
        match self {
            ColumnMetric::Definite(q) => q.matrix().as_dmatrix(),
            ColumnMetric::Semidefinite { q, .. } => q.as_dmatrix(),
        }
    }
}

/// Eigenvalues clamped at zero, plus the rank above `RANK_TOL·max(λ₁, floor)`.
fn clamp_spectrum(values: &mut [f64], scale: f64, floor: f64) -> Result<usize> {
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -EIG_TOL * scale {
                return Err(Error::ConvergenceFailure(format!(
                    "operator should be nonnegative definite but has eigenvalue {v:e}"
                )));
            }
            *v = 0.0;
        }
    }
    let top = values.first().copied().unwrap_or(0.0).max(floor);
    Ok(values.iter().filter(|&&v| top > 0.0 && v > RANK_TOL * top).count())
}

pub(crate) fn decompose(x: &Matrix, col: ColumnMetric<'_>, d: &SpdMatrix) -> Result<DiagramEigen> {
    let (n, p) = (x.rows(), x.cols());
    let x = x.as_dmatrix();
    let q = col.matrix();
    let definite = matches!(col, ColumnMetric::Definite(_));
    let floor = match col {
        ColumnMetric::Definite(_) => 0.0,
        ColumnMetric::Semidefinite { scale, .. } => scale,
    };

    if p <= n {
        let qh = match &col {
            ColumnMetric::Definite(q) => q.sqrt().into_inner(),
            ColumnMetric::Semidefinite { sqrt, .. } => sqrt.as_dmatrix().clone(),
        };
        let v = crossprod(x, d.matrix());
        let s = crate::linalg::symmetrize(&(&qh * &v * &qh));
        let eig = sym_eigen(&Matrix::checked(s.clone())?)?;
        let mut values = eig.values;
        let rank = clamp_spectrum(&mut values, s.norm(), floor)?;
        let u = eig.vectors.as_dmatrix();

        let kept = if definite { p } else { rank };
        let mut cols = DMatrix::zeros(p, kept);
        match &col {
            ColumnMetric::Definite(q) => cols.copy_from(&(q.inv_sqrt().as_dmatrix() * u)),
            ColumnMetric::Semidefinite { .. } => {
                for (k, l) in values[..rank].iter().enumerate() {
                    cols.set_column(k, &(&v * &qh * u.column(k) / *l));
                }
            }
        }
        let xq = x * q;
        let mut rows = DMatrix::zeros(n, kept);
        for (k, l) in values[..rank].iter().enumerate() {
            rows.set_column(k, &(&xq * cols.column(k) / l.sqrt()));
        }
        if definite && rank < kept {
            complete_basis(&mut rows, rank, d.sqrt().as_dmatrix(), d.inv_sqrt().as_dmatrix());
        }
        values.truncate(kept);
        Ok(DiagramEigen {
            values,
            col_vectors: Matrix::checked(cols)?,
            row_vectors: Matrix::checked(rows)?,
            rank,
        })
    } else {
        let dh = d.sqrt();
        let w = gram(x, q);
        let s = crate::linalg::symmetrize(&(dh.as_dmatrix() * &w * dh.as_dmatrix()));
        let eig = sym_eigen(&Matrix::checked(s.clone())?)?;
        let mut values = eig.values;
        let rank = clamp_spectrum(&mut values, s.norm(), floor)?;

        let kept = if definite { n } else { rank };
        let rows_full = d.inv_sqrt().as_dmatrix() * eig.vectors.as_dmatrix();
        let rows = rows_full.columns(0, kept).into_owned();
        let xtd = x.transpose() * d.matrix().as_dmatrix();
        let mut cols = DMatrix::zeros(p, kept);
        for (k, l) in values[..rank].iter().enumerate() {
            cols.set_column(k, &(&xtd * rows.column(k) / l.sqrt()));
        }
        if let ColumnMetric::Definite(q) = &col {
            if rank < kept {
                complete_basis(&mut cols, rank, q.sqrt().as_dmatrix(), q.inv_sqrt().as_dmatrix());
            }
        }
        values.truncate(kept);
        Ok(DiagramEigen {
            values,
            col_vectors: Matrix::checked(cols)?,
            row_vectors: Matrix::checked(rows)?,
            rank,
        })
    }
}

/// Fills columns `filled..` of `basis` so that all columns are orthonormal in
/// the metric `M`, given `M^{1/2}` and `M^{-1/2}`. Works in `M^{1/2}`
/// coordinates, adding at each step the coordinate axis with the largest
/// component outside the current span.
fn complete_basis(basis: &mut DMatrix<f64>, filled: usize, m_sqrt: &DMatrix<f64>, m_inv_sqrt: &DMatrix<f64>) {
    let dim = basis.nrows();
    let total = basis.ncols();
    let mut ortho: Vec<nalgebra::DVector<f64>> = (0..filled)
        .map(|k| {
            let y = m_sqrt * basis.column(k);
            let norm = y.norm();
            y / norm
        })
        .collect();
    for k in filled..total {
        // Squared norm of each axis's component outside the span.
        let best = (0..dim)
            .map(|i| 1.0 - ortho.iter().map(|y| y[i] * y[i]).sum::<f64>())
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc })
            .0;
        let mut e = nalgebra::DVector::zeros(dim);
        e[best] = 1.0;
        for _ in 0..2 {
            for y in &ortho {
                let c = y.dot(&e);
                e.axpy(-c, y, 1.0);
            }
        }
        let norm = e.norm();
        let y = e / norm;
        basis.set_column(k, &(m_inv_sqrt * &y));
        ortho.push(y);
    }
}
