//! Dense matrix primitives: a finite-valued matrix type, a cyclic Jacobi
//! symmetric eigensolver, and symmetric positive definite metrics with their
//! real powers.

use std::fmt;
use std::ops::Deref;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative asymmetry `‖A − Aᵀ‖_F / ‖A‖_F` accepted as symmetric.
pub const SYM_TOL: f64 = 1e-8;
/// Smallest eigenvalue, relative to the largest, accepted as positive.
pub const SPD_TOL: f64 = 1e-12;
/// Relative tolerance for eigen-identities (reconstruction, orthonormality).
pub const EIG_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// A dense real matrix whose entries are all finite.
///
/// Dereferences to [`nalgebra::DMatrix`] for read-only arithmetic.
#[derive(Clone, PartialEq)]
pub struct Matrix(DMatrix<f64>);

impl Matrix {
    /// Builds a matrix from entries listed row by row.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                found: entries.len(),
            });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let p = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(n * p);
        for row in rows {
            let row = row.as_ref();
            if row.len() != p {
                return Err(Error::ShapeMismatch {
                    rows: n,
                    cols: p,
                    found: entries.len() + row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_row_slice(n, p, &entries)
    }

    pub fn from_dmatrix(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().all(|v| v.is_finite()) {
            Ok(Matrix(m))
        } else {
            Err(Error::NonFinite)
        }
    }

    /// Wraps the result of an internal computation, rejecting overflow.
    pub(crate) fn checked(m: DMatrix<f64>) -> Result<Self> {
        Self::from_dmatrix(m)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Matrix(DMatrix::identity(n, n))
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::from_dmatrix(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            values,
        )))
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    /// Entries in row-major order.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.transpose().as_slice().to_vec()
    }

    pub fn row_vec(&self, i: usize) -> Vec<f64> {
        self.0.row(i).iter().copied().collect()
    }

    pub fn column_vec(&self, j: usize) -> Vec<f64> {
        self.0.column(j).iter().copied().collect()
    }

    /// `‖A − Aᵀ‖_F / ‖A‖_F`, zero for the zero matrix.
    pub fn relative_asymmetry(&self) -> Result<f64> {
        if !self.0.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows(),
                cols: self.cols(),
            });
        }
        let norm = self.0.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        Ok((&self.0 - self.0.transpose()).norm() / norm)
    }

    pub(crate) fn ensure_symmetric(&self) -> Result<()> {
        let asymmetry = self.relative_asymmetry()?;
        if asymmetry > SYM_TOL {
            return Err(Error::NotSymmetric { asymmetry });
        }
        Ok(())
    }
}

impl Deref for Matrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{:?}", self.0.shape())?;
        for i in 0..self.rows() {
            write!(f, "\n  {:?}", self.row_vec(i))?;
        }
        Ok(())
    }
}

/// `(A + Aᵀ) / 2`.
pub(crate) fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Eigendecomposition of a symmetric matrix.
///
/// `values` are sorted non-increasing; `vectors` holds the matching
/// orthonormal eigenvectors as columns. Each column is signed so that its
/// entry of largest magnitude is positive (first such entry on ties).
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl SymEigen {
    /// Rebuilds `V·f(Λ)·Vᵀ`.
    pub(crate) fn compose(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let v = self.vectors.as_dmatrix();
        let mut scaled = v.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            scaled.column_mut(j).scale_mut(s);
        }
        symmetrize(&(scaled * v.transpose()))
    }
}

/// Symmetric eigendecomposition by the cyclic Jacobi method.
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    a.ensure_symmetric()?;
    let (values, vectors) = jacobi(&symmetrize(a.as_dmatrix()))?;
    Ok(SymEigen {
        values,
        vectors: Matrix::checked(vectors)?,
    })
}

fn jacobi(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm();

    let mut converged = scale == 0.0 || n < 2;
    let mut sweep = 0;
    while !converged {
        if sweep == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure(format!(
                "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweep += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                // Negligible against both diagonal entries: drop it.
                if sweep > 4 && (app.abs() + 1e3 * apq.abs() == app.abs())
                    && (aqq.abs() + 1e3 * apq.abs() == aqq.abs())
                {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        converged = off.sqrt() <= 1e-3 * f64::EPSILON * scale;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = v.select_columns(&order);
    normalize_signs(&mut vectors);
    Ok((values, vectors))
}

/// Flips each column so its largest-magnitude entry is positive.
pub(crate) fn normalize_signs(vectors: &mut DMatrix<f64>) {
    for mut col in vectors.column_iter_mut() {
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if !col.is_empty() && col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// A symmetric positive definite matrix, stored with its eigendecomposition.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    base: Matrix,
    eigen: SymEigen,
}

impl SpdMatrix {
    pub fn dim(&self) -> usize {
        self.base.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.base
    }

    pub fn eigen(&self) -> &SymEigen {
        &self.eigen
    }

    pub fn identity(n: usize) -> Self {
        // Entries are positive, so this cannot fail.
        Self::diagonal(&vec![1.0; n]).expect("identity is positive definite")
    }

    /// A diagonal metric; skips the eigensolver.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let base = Matrix::diagonal(values)?;
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        check_definite(&sorted)?;
        let vectors = DMatrix::<f64>::identity(n, n).select_columns(&order);
        Ok(SpdMatrix {
            base,
            eigen: SymEigen {
                values: sorted,
                vectors: Matrix(vectors),
            },
        })
    }

    /// `Q^{1/2}`.
    pub fn sqrt(&self) -> Matrix {
        spd_power(self, 0.5)
    }

    /// `Q^{-1/2}`.
    pub fn inv_sqrt(&self) -> Matrix {
        spd_power(self, -0.5)
    }

    pub fn inverse(&self) -> Matrix {
        spd_power(self, -1.0)
    }

    /// Spectral condition number `λ_max / λ_min`.
    pub fn condition(&self) -> f64 {
        let v = &self.eigen.values;
        v[0] / v[v.len() - 1]
    }
}

fn check_definite(sorted: &[f64]) -> Result<()> {
    let largest = sorted.first().copied().unwrap_or(0.0);
    let smallest = sorted.last().copied().unwrap_or(0.0);
    if sorted.is_empty() || largest <= 0.0 || smallest <= SPD_TOL * largest {
        return Err(Error::NotPositiveDefinite { smallest, largest });
    }
    Ok(())
}

/// Validates that `a` is symmetric positive definite.
pub fn spd_check(a: &Matrix) -> Result<SpdMatrix> {
    let eigen = sym_eigen(a)?;
    check_definite(&eigen.values)?;
    Ok(SpdMatrix {
        base: Matrix(symmetrize(a.as_dmatrix())),
        eigen,
    })
}

/// A factor `L` with `Q = L·Lᵀ`; this is the symmetric square root, so `L = Lᵀ`.
pub fn spd_factor(q: &SpdMatrix) -> Matrix {
    q.sqrt()
}

/// `Q^a`: same eigenvectors, eigenvalues mapped to `λ^a`.
pub fn spd_power(q: &SpdMatrix, a: f64) -> Matrix {
    if a == 0.0 {
        return Matrix::identity(q.dim());
    }
    if a == 1.0 {
        return q.base.clone();
    }
    Matrix(q.eigen.compose(|lambda| lambda.powf(a)))
}

/// Square root of a symmetric nonnegative definite matrix, with its rank.
///
/// Eigenvalues in `[-EIG_TOL·λ_max, 0)` are treated as zero.
pub fn psd_sqrt(a: &Matrix) -> Result<(Matrix, usize)> {
    let (root, eigen) = psd_sqrt_eigen(a)?;
    let largest = eigen.values[0];
    let rank = eigen
        .values
        .iter()
        .filter(|&&l| largest > 0.0 && l > crate::triplet::RANK_TOL * largest)
        .count();
    Ok((root, rank))
}

pub(crate) fn psd_sqrt_eigen(a: &Matrix) -> Result<(Matrix, SymEigen)> {
    let eigen = sym_eigen(a)?;
    let largest = eigen.values.first().copied().unwrap_or(0.0).max(0.0);
    let smallest = eigen.values.last().copied().unwrap_or(0.0);
    if smallest < -EIG_TOL * largest.max(a.norm()) {
        return Err(Error::NotNonnegativeDefinite { smallest, largest });
    }
    let root = eigen.compose(|l| if l > 0.0 { l.sqrt() } else { 0.0 });
    Ok((Matrix(root), eigen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_spd, random_symmetric, rng};

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn diagonal_eigen() {
        let e = sym_eigen(&Matrix::diagonal(&[2.0, 1.0]).unwrap()).unwrap();
        assert_eq!(e.values, vec![2.0, 1.0]);
        assert_eq!(e.vectors.as_dmatrix(), &DMatrix::identity(2, 2));

        let e = sym_eigen(&Matrix::diagonal(&[1.0, 3.0]).unwrap()).unwrap();
        assert_eq!(e.values, vec![3.0, 1.0]);
        assert_eq!(e.vectors.column_vec(0), vec![0.0, 1.0]);
    }

    #[test]
    fn swap_matrix_eigen() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let e = sym_eigen(&a).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.vectors.column_vec(0);
        assert!((v0[0] - h).abs() < 1e-15 && (v0[1] - h).abs() < 1e-15);
        // (1,-1)/√2 with equal magnitudes: first entry is made positive.
        let v1 = e.vectors.column_vec(1);
        assert!((v1[0] - h).abs() < 1e-15 && (v1[1] + h).abs() < 1e-15);
    }

    #[test]
    fn random_symmetric_reconstructs() {
        let mut r = rng(11);
        for n in [1, 2, 6, 15, 40] {
            let a = random_symmetric(&mut r, n);
            let e = sym_eigen(&a).unwrap();
            let v = e.vectors.as_dmatrix();
            let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
            let recon = v * lam * v.transpose();
            assert!(close(&recon, &a, 1e-10 * a.norm()), "n={n}");
            assert!(close(&(v.transpose() * v), &DMatrix::identity(n, n), EIG_TOL));
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(sym_eigen(&rect), Err(Error::NonSquare { .. })));
        let asym = Matrix::from_rows(&[[1.0, 2.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(sym_eigen(&asym), Err(Error::NotSymmetric { .. })));
        assert_eq!(
            Matrix::from_row_slice(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite)
        );
        assert!(matches!(
            Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0]]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn spd_check_cases() {
        assert!(spd_check(&Matrix::identity(3)).is_ok());
        let singular = Matrix::diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            spd_check(&singular),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let indefinite = Matrix::diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            spd_check(&indefinite),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(SpdMatrix::diagonal(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn factor_and_powers() {
        let q = spd_check(&Matrix::diagonal(&[4.0, 9.0]).unwrap()).unwrap();
        let l = spd_factor(&q);
        assert!(close(l.as_dmatrix(), Matrix::diagonal(&[2.0, 3.0]).unwrap().as_dmatrix(), 1e-14));
        assert!(close(
            spd_power(&q, 0.5).as_dmatrix(),
            Matrix::diagonal(&[2.0, 3.0]).unwrap().as_dmatrix(),
            1e-14
        ));
        let id = spd_factor(&SpdMatrix::identity(4));
        assert!(close(id.as_dmatrix(), &DMatrix::identity(4, 4), 1e-15));

        let mut r = rng(5);
        let q = random_spd(&mut r, 5);
        let l = spd_factor(&q);
        let llt = l.as_dmatrix() * l.transpose();
        assert!(close(&llt, q.matrix(), 1e-10 * q.matrix().norm()));
        assert_eq!(spd_power(&q, 0.0).as_dmatrix(), &DMatrix::identity(5, 5));

        let q = random_spd(&mut r, 4);
        let h = spd_power(&q, 0.5);
        assert!(close(&(h.as_dmatrix() * h.as_dmatrix()), q.matrix(), 1e-10 * q.matrix().norm()));
        let prod = spd_power(&q, 0.5).as_dmatrix() * spd_power(&q, -0.5).as_dmatrix();
        assert!(close(&prod, &DMatrix::identity(4, 4), EIG_TOL));
    }

    #[test]
    fn diagonal_metric_matches_general_path() {
        let d = SpdMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        let g = spd_check(d.matrix()).unwrap();
        assert_eq!(d.eigen().values, g.eigen().values);
        assert!(close(d.inv_sqrt().as_dmatrix(), g.inv_sqrt().as_dmatrix(), 1e-14));
    }

    #[test]
    fn psd_sqrt_handles_rank_deficiency() {
        let mut r = rng(9);
        let x = random_matrix(&mut r, 5, 2);
        let a = Matrix::from_dmatrix(x.as_dmatrix() * x.transpose()).unwrap();
        let (root, rank) = psd_sqrt(&a).unwrap();
        assert_eq!(rank, 2);
        assert!(close(&(root.as_dmatrix() * root.as_dmatrix()), &a, 1e-10 * a.norm()));
        assert!(psd_sqrt(&Matrix::diagonal(&[1.0, -1.0]).unwrap()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::SeedableRng;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn power_composition(seed in any::<u64>(), dim in 1usize..=20,
                                 ai in 0usize..4, bi in 0usize..4) {
                let exps = [-1.0, -0.5, 0.5, 1.0];
                let (a, b) = (exps[ai], exps[bi]);
                let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let q = random_spd(&mut r, dim);
                let lhs = spd_power(&q, a).as_dmatrix() * spd_power(&q, b).as_dmatrix();
                let rhs = spd_power(&q, a + b);
                let scale = rhs.norm().max(1.0);
                prop_assert!((lhs - rhs.as_dmatrix()).norm() <= 1e-9 * scale);
            }

            #[test]
            fn eigen_invariants(seed in any::<u64>(), dim in 1usize..=25) {
                let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let a = random_symmetric(&mut r, dim);
                let e = sym_eigen(&a).unwrap();
                let v = e.vectors.as_dmatrix();
                let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
                prop_assert!((a.as_dmatrix() * v - v * lam).norm() <= EIG_TOL * a.norm());
                prop_assert!((v.transpose() * v - DMatrix::identity(dim, dim)).norm() <= EIG_TOL);
            }

            #[test]
            fn factor_reconstructs(seed in any::<u64>(), dim in 1usize..=20) {
                let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let q = random_spd(&mut r, dim);
                let l = spd_factor(&q);
                prop_assert!((l.as_dmatrix() * l.transpose() - q.matrix().as_dmatrix()).norm()
                    <= 1e-10 * q.matrix().norm());
            }
        }
    }
}
