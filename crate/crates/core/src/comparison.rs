//! Comparing diagrams that share a row metric `D`.
//!
//! Each diagram `(X_i, Q_i, D)` is represented by its operator `W_i·D`, an
//! n×n `D`-symmetric matrix regardless of the number of variables `p_i`.
//! `COVV(A, B) = tr(AB)` is an inner product on such operators and the RV
//! coefficient is the cosine it induces. STATIS weights the diagrams by the
//! leading eigenvector of the k×k RV (or COVV) matrix and summarizes them by
//! the compromise `W = Σ u_i·W_i`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{sym_eigen, symmetrize, Matrix, SpdMatrix, SymEigen, EIG_TOL};
use crate::triplet::{trace_of_product, Triplet, RANK_TOL};

/// Relative gap below which the leading eigenvalue counts as repeated.
pub const PERRON_GAP_TOL: f64 = 1e-9;

fn check_operator(w: &Matrix, d: &SpdMatrix) -> Result<()> {
    if w.rows() != d.dim() || w.cols() != d.dim() {
        return Err(Error::DimensionMismatch {
            what: "operator W",
            expected: d.dim(),
            found: if w.rows() != d.dim() { w.rows() } else { w.cols() },
        });
    }
    w.ensure_symmetric()
}

/// `tr(AB)`, averaged over both summation orders so that swapping the
/// arguments gives a bitwise identical result.
fn symmetric_trace(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    0.5 * (trace_of_product(a, b) + trace_of_product(b, a))
}

fn covv_unchecked(w1: &DMatrix<f64>, w2: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    symmetric_trace(&(w1 * d), &(w2 * d))
}

/// `COVV(W₁D, W₂D) = tr(W₁·D·W₂·D)`.
pub fn covv(w1: &Matrix, w2: &Matrix, d: &SpdMatrix) -> Result<f64> {
    check_operator(w1, d)?;
    check_operator(w2, d)?;
    Ok(covv_unchecked(w1, w2, d.matrix()))
}

/// Rejects indefinite and zero operators, naming the offender by `label`.
fn check_rv_operand(w: &Matrix, d: &SpdMatrix, label: &str) -> Result<()> {
    check_operator(w, d)?;
    if w.norm() == 0.0 || covv_unchecked(w, w, d.matrix()) <= 0.0 {
        return Err(Error::ZeroOperator { label: label.to_string() });
    }
    let e = sym_eigen(w)?;
    let largest = e.values[0];
    let smallest = *e.values.last().expect("nonempty");
    if smallest < -EIG_TOL * largest.abs().max(w.norm()) {
        return Err(Error::NotNonnegativeDefinite { smallest, largest });
    }
    Ok(())
}

fn rv_unchecked(w1: &DMatrix<f64>, w2: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let a = w1 * d;
    let b = w2 * d;
    let num = symmetric_trace(&a, &b);
    let den = (trace_of_product(&a, &a) * trace_of_product(&b, &b)).sqrt();
    (num / den).clamp(0.0, 1.0)
}

/// `RV(W₁D, W₂D) = COVV(W₁D, W₂D) / √(COVV(W₁D, W₁D)·COVV(W₂D, W₂D))`.
///
/// Both `W` must be symmetric, nonzero and nonnegative definite; the value is
/// then in `[0, 1]`.
pub fn rv(w1: &Matrix, w2: &Matrix, d: &SpdMatrix) -> Result<f64> {
    check_rv_operand(w1, d, "w1")?;
    check_rv_operand(w2, d, "w2")?;
    Ok(rv_unchecked(w1, w2, d.matrix()))
}

/// `k ≥ 2` labelled diagrams on the same individuals, sharing `D`.
#[derive(Debug, Clone)]
pub struct DiagramCollection {
    d: SpdMatrix,
    diagrams: Vec<Triplet>,
    labels: Vec<String>,
}

impl DiagramCollection {
    /// The shared metric is taken from the first diagram; all others must
    /// match it entrywise within `1e-12` (relative to its largest entry).
    pub fn new(diagrams: Vec<Triplet>, labels: Vec<String>) -> Result<Self> {
        if diagrams.len() < 2 {
            return Err(Error::TooFewDiagrams(diagrams.len()));
        }
        if labels.len() != diagrams.len() {
            return Err(Error::DimensionMismatch {
                what: "diagram labels",
                expected: diagrams.len(),
                found: labels.len(),
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let d = diagrams[0].d().clone();
        let scale = d.matrix().amax().max(1.0);
        for (t, label) in diagrams.iter().zip(&labels) {
            let same = t.d().dim() == d.dim()
                && (t.d().matrix().as_dmatrix() - d.matrix().as_dmatrix()).amax() <= 1e-12 * scale;
            if !same {
                return Err(Error::MetricMismatch { label: label.clone() });
            }
        }
        Ok(DiagramCollection { d, diagrams, labels })
    }

    pub fn d(&self) -> &SpdMatrix {
        &self.d
    }

    pub fn diagrams(&self) -> &[Triplet] {
        &self.diagrams
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    /// The `W_i = X_i·Q_i·X_iᵀ`, in order.
    pub fn operators(&self) -> Vec<Matrix> {
        self.diagrams.iter().map(Triplet::gram_w).collect()
    }
}

/// The k×k matrices `C[i][j] = COVV(W_iD, W_jD)` and `R[i][j] = RV(W_iD, W_jD)`.
pub fn coefficient_matrices(coll: &DiagramCollection) -> Result<(Matrix, Matrix)> {
    let ops = coll.operators();
    coefficients_of(&ops, coll)
}

fn coefficients_of(ops: &[Matrix], coll: &DiagramCollection) -> Result<(Matrix, Matrix)> {
    for (w, label) in ops.iter().zip(coll.labels()) {
        check_rv_operand(w, coll.d(), label)?;
    }
    let d = coll.d().matrix().as_dmatrix();
    let k = ops.len();
    let mut c = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let value = covv_unchecked(&ops[i], &ops[j], d);
            c[(i, j)] = value;
            c[(j, i)] = value;
        }
    }
    let mut r = DMatrix::identity(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let value = (c[(i, j)] / (c[(i, i)] * c[(j, j)]).sqrt()).clamp(0.0, 1.0);
            r[(i, j)] = value;
            r[(j, i)] = value;
        }
    }
    Ok((Matrix::checked(c)?, Matrix::checked(r)?))
}

/// Which coefficient matrix supplies the STATIS weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StatisBasis {
    Covv,
    #[default]
    Rv,
}

/// Eigenstructure of a `D`-symmetric operator `W·D`, computed through
/// `D^{1/2}·W·D^{1/2}`. `vectors` are `D`-orthonormal.
#[derive(Debug, Clone)]
pub struct OperatorEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
    pub rank: usize,
}

impl OperatorEigen {
    /// `√λ_k·w_k` for the first `k` axes.
    pub fn scores(&self, k: usize) -> Result<Matrix> {
        if k > self.rank {
            return Err(Error::RankExceeded {
                requested: k,
                available: self.rank,
            });
        }
        let mut out = self.vectors.columns(0, k).into_owned();
        for (j, mut col) in out.column_iter_mut().enumerate() {
            col.scale_mut(self.values[j].sqrt());
        }
        Matrix::checked(out)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

pub fn operator_eigen(w: &Matrix, d: &SpdMatrix) -> Result<OperatorEigen> {
    check_operator(w, d)?;
    let dh = d.sqrt();
    let s = symmetrize(&(dh.as_dmatrix() * w.as_dmatrix() * dh.as_dmatrix()));
    let scale = s.norm();
    let e = sym_eigen(&Matrix::checked(s)?)?;
    let mut values = e.values;
    let top = values[0].max(0.0);
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -EIG_TOL * scale {
                return Err(Error::NotNonnegativeDefinite {
                    smallest: *v,
                    largest: top,
                });
            }
            *v = 0.0;
        }
    }
    let rank = values.iter().filter(|&&v| top > 0.0 && v > RANK_TOL * top).count();
    let vectors = Matrix::checked(d.inv_sqrt().as_dmatrix() * e.vectors.as_dmatrix())?;
    Ok(OperatorEigen { values, vectors, rank })
}

#[derive(Debug, Clone)]
pub struct StatisResult {
    pub covv_matrix: Matrix,
    pub rv_matrix: Matrix,
    pub basis: StatisBasis,
    /// Eigendecomposition of the basis matrix (`C` or `R`).
    pub basis_eigen: SymEigen,
    /// Leading eigenvector of the basis matrix, nonnegative and summing to 1.
    pub weights: Vec<f64>,
    /// `W = Σ u_i·W_i`.
    pub compromise_w: Matrix,
    pub compromise_eigen: OperatorEigen,
    /// `RV(W_iD, WD)` for each diagram: similarity, not distance.
    pub distances_to_compromise: Vec<f64>,
}

pub fn statis(coll: &DiagramCollection, basis: StatisBasis) -> Result<StatisResult> {
    let ops = coll.operators();
    let (c, r) = coefficients_of(&ops, coll)?;
    let chosen = match basis {
        StatisBasis::Covv => &c,
        StatisBasis::Rv => &r,
    };
    let basis_eigen = sym_eigen(chosen)?;
    let l1 = basis_eigen.values[0];
    let l2 = basis_eigen.values[1];
    let gap = (l1 - l2) / l1.abs();
    if gap.is_nan() || gap < PERRON_GAP_TOL {
        return Err(Error::PerronAmbiguity { gap });
    }
    let mut u: Vec<f64> = basis_eigen.vectors.column_vec(0);
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|x| *x = -*x);
    }
    u.iter_mut().for_each(|x| *x = x.max(0.0));
    let total: f64 = u.iter().sum();
    let weights: Vec<f64> = u.iter().map(|x| x / total).collect();

    let n = coll.d().dim();
    let mut compromise = DMatrix::zeros(n, n);
    for (w, &u) in ops.iter().zip(&weights) {
        compromise += w.as_dmatrix() * u;
    }
    let compromise_w = Matrix::checked(symmetrize(&compromise))?;
    let compromise_eigen = operator_eigen(&compromise_w, coll.d())?;
    let d = coll.d().matrix().as_dmatrix();
    let distances_to_compromise = ops.iter().map(|w| rv_unchecked(w, &compromise_w, d)).collect();
    Ok(StatisResult {
        covv_matrix: c,
        rv_matrix: r,
        basis,
        basis_eigen,
        weights,
        compromise_w,
        compromise_eigen,
        distances_to_compromise,
    })
}

/// Coordinates of the diagrams on the leading `axes` eigenvectors of a
/// coefficient matrix, scaled by `√λ` (the "PCA of PCAs").
pub fn interstructure(coefficients: &Matrix, axes: usize) -> Result<Matrix> {
    let e = sym_eigen(coefficients)?;
    let axes = axes.min(e.values.len());
    let mut out = e.vectors.columns(0, axes).into_owned();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.scale_mut(e.values[j].max(0.0).sqrt());
    }
    Matrix::checked(out)
}
