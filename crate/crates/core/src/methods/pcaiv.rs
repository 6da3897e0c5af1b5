//! PCA with respect to instrumental variables (redundancy analysis).
//!
//! Given explanatory data `X` (n×p) and a response diagram `(Y, Q, D)`, the
//! metric `R = S_xx⁻¹·S_xy·Q·S_yx·S_xx⁻¹` makes `(X, R, D)` the closest
//! diagram on `X` to `(Y, Q, D)`: `X·R·Xᵀ = Ŷ·Q·Ŷᵀ` where `Ŷ` is the
//! `D`-weighted least-squares fit of `Y` on `X`. A rank-`q` analysis is the
//! rank-`q` PCA of `(X, R, D)`.
//!
//! `R` is only nonnegative definite in general (it is zero when `XᵀDY = 0`),
//! so the decomposition keeps just the eigenpairs with nonzero eigenvalue.
//! Because the fitted operator can never exceed the response, "nonzero" is
//! judged against the response inertia `tr(S_yy·Q)` rather than against the
//! (possibly pure rounding noise) largest eigenvalue of `R`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{psd_sqrt_eigen, symmetrize, sym_eigen, Matrix, SpdMatrix};
use crate::triplet::{crossprod, decompose, trace_of_product, ColumnMetric, DiagramEigen, Triplet, RANK_TOL};

/// Largest accepted spectral condition number of `S_xx`.
pub const COND_TOL: f64 = 1e12;
/// Smallest accepted gap `λ_q − λ_{q+1}`, relative to `λ₁`.
pub const EIGENGAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PcaivResult {
    /// `R = S_xx⁻¹·S_xy·Q·S_yx·S_xx⁻¹`, symmetric nonnegative definite.
    pub r_metric: Matrix,
    /// Numerical rank of `R`, relative to `tr(S_yy·Q) / λ_min(S_xx)`.
    pub r_rank: usize,
    /// Regression coefficients `S_xx⁻¹·S_xy` (p×p_y).
    pub coefficients: Matrix,
    /// `Ŷ = X·S_xx⁻¹·S_xy`.
    pub fitted_values: Matrix,
    /// Columns `β_k/√λ_k`: eigenvectors of `XᵀDX·R` normalized so that
    /// `β_kᵀ·R·β_k = λ_k`, i.e. `R`-orthonormal.
    pub b: Matrix,
    /// Leading `q` eigenpairs of `(X, R, D)`.
    pub eigen: DiagramEigen,
    x: Matrix,
    d: SpdMatrix,
}

impl PcaivResult {
    /// `β_k = √λ_k · b_k`.
    pub fn betas(&self) -> Matrix {
        let mut out = self.b.as_dmatrix().clone();
        for (k, mut col) in out.column_iter_mut().enumerate() {
            col.scale_mut(self.eigen.values[k].sqrt());
        }
        Matrix::checked(out).expect("finite")
    }

    /// The optimal rank-`q` metric `M = R·B·Bᵀ·R`.
    pub fn rank_q_metric(&self) -> Matrix {
        let rb = self.r_metric.as_dmatrix() * self.b.as_dmatrix();
        Matrix::checked(symmetrize(&(&rb * rb.transpose()))).expect("finite")
    }

    /// Row scores `X·R·b_k = √λ_k·w_k`.
    pub fn row_scores(&self) -> Matrix {
        let xr = self.x.as_dmatrix() * self.r_metric.as_dmatrix();
        Matrix::checked(xr * self.b.as_dmatrix()).expect("finite")
    }

    /// `(X, R, D)` as a triplet when `R` is positive definite.
    pub fn fitted_triplet(&self) -> Option<Triplet> {
        let r = crate::linalg::spd_check(&self.r_metric).ok()?;
        Triplet::new(self.x.clone(), r, self.d.clone()).ok()
    }
}

pub fn pcaiv(x: &Matrix, y: &Matrix, q: &SpdMatrix, d: &SpdMatrix, rank_q: usize) -> Result<PcaivResult> {
    let n = x.rows();
    if y.rows() != n {
        return Err(Error::DimensionMismatch {
            what: "response rows",
            expected: n,
            found: y.rows(),
        });
    }
    if q.dim() != y.cols() {
        return Err(Error::DimensionMismatch {
            what: "response metric Q",
            expected: y.cols(),
            found: q.dim(),
        });
    }
    if d.dim() != n {
        return Err(Error::DimensionMismatch {
            what: "row metric D",
            expected: n,
            found: d.dim(),
        });
    }

    let dm = d.matrix().as_dmatrix();
    let sxx = crossprod(x, dm);
    let sxx_eigen = sym_eigen(&Matrix::checked(sxx)?)?;
    let largest = sxx_eigen.values[0];
    let smallest = *sxx_eigen.values.last().expect("nonempty");
    let condition = if smallest > 0.0 { largest / smallest } else { f64::INFINITY };
    if condition.is_nan() || condition > COND_TOL {
        return Err(Error::SingularSxx { condition });
    }
    let sxx_inv = sxx_eigen.compose(|l| 1.0 / l);
    let sxy = x.transpose() * dm * y.as_dmatrix();
    let coefficients: DMatrix<f64> = &sxx_inv * &sxy;
    let r = symmetrize(&(&coefficients * q.matrix().as_dmatrix() * coefficients.transpose()));
    let r_metric = Matrix::checked(r)?;
    let (r_sqrt, r_eigen) = psd_sqrt_eigen(&r_metric)?;
    let response_inertia = trace_of_product(&crossprod(y, dm), q.matrix());
    let r_scale = r_eigen.values[0].max(response_inertia / smallest);
    let r_rank = r_eigen.values.iter().filter(|&&l| l > RANK_TOL * r_scale).count();

    let full = decompose(
        x,
        ColumnMetric::Semidefinite {
            q: &r_metric,
            sqrt: &r_sqrt,
            scale: response_inertia,
        },
        d,
    )?;
    if rank_q > full.rank {
        return Err(Error::RankExceeded {
            requested: rank_q,
            available: full.rank,
        });
    }
    if rank_q > 0 {
        let top = full.values[0];
        let next = full.values.get(rank_q).copied().unwrap_or(0.0);
        let gap = full.values[rank_q - 1] - next;
        if gap < EIGENGAP_TOL * top {
            return Err(Error::EigengapViolation { rank: rank_q, gap });
        }
    }
    let eigen = full.truncate(rank_q);
    let fitted_values = Matrix::checked(x.as_dmatrix() * &coefficients)?;
    Ok(PcaivResult {
        r_metric,
        r_rank,
        coefficients: Matrix::checked(coefficients)?,
        fitted_values,
        b: eigen.col_vectors.clone(),
        eigen,
        x: x.clone(),
        d: d.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::comparison::covv;
    use crate::random::{random_matrix, random_spd, random_weights, rng};
    use crate::triplet::gram;

    fn rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn self_response_recovers_q() {
        let mut r = rng(41);
        for _ in 0..10 {
            let x = random_matrix(&mut r, 10, 3);
            let q = random_spd(&mut r, 3);
            let d = random_spd(&mut r, 10);
            let res = pcaiv(&x, &x, &q, &d, 2).unwrap();
            assert!(rel(&res.r_metric, q.matrix()) <= 1e-9);
            let plain = Triplet::new(x.clone(), q.clone(), d.clone()).unwrap().diagram_eigen().unwrap();
            for k in 0..2 {
                assert!((res.eigen.values[k] - plain.values[k]).abs() <= 1e-9 * plain.values[0]);
            }
            assert!(res.fitted_triplet().is_some());
        }
    }

    #[test]
    fn b_satisfies_eigen_conditions() {
        let mut r = rng(42);
        let x = random_matrix(&mut r, 15, 4);
        let y = random_matrix(&mut r, 15, 3);
        let res = pcaiv(&x, &y, &random_spd(&mut r, 3), &random_spd(&mut r, 15), 2).unwrap();
        let v = crossprod(&x, res.d.matrix());
        let op = &v * res.r_metric.as_dmatrix();
        let betas = res.betas();
        for k in 0..2 {
            let beta = betas.column(k);
            let lambda = res.eigen.values[k];
            assert!((&op * beta - beta * lambda).norm() <= 1e-9 * lambda);
            let quad = (beta.transpose() * res.r_metric.as_dmatrix() * beta)[(0, 0)];
            assert!((quad - lambda).abs() <= 1e-9 * lambda);
        }
        assert!(res.eigen.values[0] > res.eigen.values[1]);
        // R-orthonormal b; the rank-q metric reproduces the rank-q diagram.
        let btrb = res.b.transpose() * res.r_metric.as_dmatrix() * res.b.as_dmatrix();
        assert!((btrb - DMatrix::identity(2, 2)).norm() <= 1e-9);
        let m = res.rank_q_metric();
        let wm = gram(&x, &m);
        let scores = res.row_scores();
        assert!(rel(&wm, &(scores.as_dmatrix() * scores.transpose())) <= 1e-9);
    }

    #[test]
    fn orthogonal_predictors_give_zero_metric() {
        let mut r = rng(43);
        let n = 9;
        let d = SpdMatrix::diagonal(&random_weights(&mut r, n)).unwrap();
        // D-orthonormalize five random columns, split 3 / 2.
        let z = random_matrix(&mut r, n, 5);
        let mut basis: Vec<nalgebra::DVector<f64>> = Vec::new();
        for j in 0..5 {
            let mut v = z.column(j).into_owned();
            for b in &basis {
                let c = (b.transpose() * d.matrix().as_dmatrix() * &v)[(0, 0)];
                v -= b * c;
            }
            let norm = (v.transpose() * d.matrix().as_dmatrix() * &v)[(0, 0)].sqrt();
            basis.push(v / norm);
        }
        let x = Matrix::from_dmatrix(DMatrix::from_columns(&basis[..3])).unwrap();
        let y = Matrix::from_dmatrix(DMatrix::from_columns(&basis[3..])).unwrap();
        let q = SpdMatrix::identity(2);
        let res = pcaiv(&x, &y, &q, &d, 0).unwrap();
        assert!(res.r_metric.norm() <= 1e-12);
        assert_eq!(res.r_rank, 0);
        assert_eq!(res.eigen.rank, 0);
        assert_eq!(
            pcaiv(&x, &y, &q, &d, 1).unwrap_err(),
            Error::RankExceeded { requested: 1, available: 0 }
        );
    }

    #[test]
    fn fitted_operator_matches_least_squares() {
        let mut r = rng(44);
        let x = random_matrix(&mut r, 12, 3);
        let y = random_matrix(&mut r, 12, 2);
        let d = SpdMatrix::identity(12);
        let q = SpdMatrix::identity(2);
        let res = pcaiv(&x, &y, &q, &d, 1).unwrap();
        let svd = nalgebra::SVD::new(x.as_dmatrix().clone(), true, true);
        let coef = svd.solve(y.as_dmatrix(), 1e-14).unwrap();
        let fitted = x.as_dmatrix() * coef;
        assert!(rel(&res.fitted_values, &fitted) <= 1e-8);
        let lhs = gram(&x, &res.r_metric);
        assert!(rel(&lhs, &(&fitted * fitted.transpose())) <= 1e-8);
    }

    #[test]
    fn norm_decomposition() {
        let mut r = rng(45);
        let (n, p) = (10, 3);
        let x = random_matrix(&mut r, n, p);
        let y = random_matrix(&mut r, n, 4);
        let q = random_spd(&mut r, 4);
        let d = random_spd(&mut r, n);
        let res = pcaiv(&x, &y, &q, &d, 1).unwrap();
        let wy = gram(&y, q.matrix());
        let wr = gram(&x, &res.r_metric);
        let norm2 = |a: &DMatrix<f64>| {
            let a = Matrix::from_dmatrix(a.clone()).unwrap();
            covv(&a, &a, &d).unwrap()
        };
        for _ in 0..5 {
            let m = random_spd(&mut r, p);
            let wm = gram(&x, m.matrix());
            let lhs = norm2(&(&wy - &wm));
            let rhs = norm2(&(&wy - &wr)) + norm2(&(&wr - &wm));
            assert!((lhs - rhs).abs() <= 1e-8 * lhs);
        }
    }

    #[test]
    fn error_paths() {
        let mut r = rng(46);
        let x = random_matrix(&mut r, 6, 2);
        let y = random_matrix(&mut r, 5, 2);
        let q = SpdMatrix::identity(2);
        let d = SpdMatrix::identity(6);
        assert!(matches!(pcaiv(&x, &y, &q, &d, 1), Err(Error::DimensionMismatch { .. })));
        let collinear = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0], [0.0, 0.0], [1.0, 2.0], [5.0, 10.0]]).unwrap();
        let y = random_matrix(&mut r, 6, 2);
        assert!(matches!(pcaiv(&collinear, &y, &q, &d, 1), Err(Error::SingularSxx { .. })));
        let too_many = pcaiv(&x, &y, &q, &d, 3).unwrap_err();
        assert!(matches!(too_many, Error::RankExceeded { requested: 3, .. }));
    }

    #[test]
    fn tied_eigenvalues_are_rejected() {
        // X = Y = identity-like columns with equal variance: R = I, λ₁ = λ₂.
        let x = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]).unwrap();
        let q = SpdMatrix::identity(2);
        let d = SpdMatrix::identity(4);
        assert!(matches!(pcaiv(&x, &x, &q, &d, 1), Err(Error::EigengapViolation { rank: 1, .. })));
        assert!(pcaiv(&x, &x, &q, &d, 2).is_ok());
    }
}
