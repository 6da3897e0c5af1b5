use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, SpdMatrix};
use crate::triplet::{center_with_weights, DiagramEigen, Triplet};

/// Column variances at or below `VAR_TOL` times the largest are treated as zero.
pub const VAR_TOL: f64 = 1e-12;

pub fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::DimensionMismatch {
            what: "row weights",
            expected: n,
            found: weights.len(),
        });
    }
    if let Some((i, w)) = weights
        .iter()
        .enumerate()
        .find(|(_, w)| !(w.is_finite() && **w > 0.0))
    {
        return Err(Error::BadWeights(format!("weight {i} is {w}, must be positive")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::BadWeights(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

/// The PCA triplet `(X_c, Q, diag(weights))` where `X_c` is `x` with its
/// weighted column means removed.
///
/// `Q` is the identity, or with `standardize` the diagonal of reciprocal
/// weighted column variances, which makes the analysis scale free (PCA of the
/// correlation matrix).
pub fn pca_triplet(x: &Matrix, weights: &[f64], standardize: bool) -> Result<Triplet> {
    let (n, p) = (x.rows(), x.cols());
    if n < 2 {
        return Err(Error::TooFewRows { required: 2, found: n });
    }
    check_weights(weights, n)?;
    let centered = center_with_weights(x, weights);
    let d = SpdMatrix::diagonal(weights)?;
    let q = if standardize {
        let variances: Vec<f64> = centered
            .column_iter()
            .map(|c| c.iter().zip(weights).map(|(v, w)| w * v * v).sum())
            .collect();
        let largest = variances.iter().copied().fold(0.0, f64::max);
        if let Some(column) = variances.iter().position(|&s| s <= VAR_TOL * largest) {
            return Err(Error::ZeroVarianceColumn { column });
        }
        let inv: Vec<f64> = variances.iter().map(|s| 1.0 / s).collect();
        SpdMatrix::diagonal(&inv)?
    } else {
        SpdMatrix::identity(p)
    };
    Triplet::new(centered, q, d)
}

/// Row scores on the first `k` axes, `X·Q·v_i = √λ_i·w_i`.
///
/// Scores use the λ-scaling: the `D`-weighted variance of column `i` is `λ_i`.
/// They come from `X·Q` directly, so `Q` is never factored.
pub fn principal_components(t: &Triplet, e: &DiagramEigen, k: usize) -> Result<Matrix> {
    if k > e.rank {
        return Err(Error::RankExceeded {
            requested: k,
            available: e.rank,
        });
    }
    let xq = t.x().as_dmatrix() * t.q().matrix().as_dmatrix();
    Matrix::checked(xq * e.col_vectors.columns(0, k))
}

/// Column coordinates on the first `k` axes, `√λ_i·v_i` (equivalently
/// `XᵀD·w_i`).
pub fn column_coordinates(e: &DiagramEigen, k: usize) -> Result<Matrix> {
    if k > e.rank {
        return Err(Error::RankExceeded {
            requested: k,
            available: e.rank,
        });
    }
    let mut out: DMatrix<f64> = e.col_vectors.columns(0, k).into_owned();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col.scale_mut(e.values[j].sqrt());
    }
    Matrix::checked(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_matrix, random_spd, random_weights, rng};
    use nalgebra::DVector;

    #[test]
    fn identical_rows() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [1.0, 2.0], [1.0, 2.0]]).unwrap();
        let w = uniform_weights(3);
        assert_eq!(
            pca_triplet(&x, &w, true).unwrap_err(),
            Error::ZeroVarianceColumn { column: 0 }
        );
        let t = pca_triplet(&x, &w, false).unwrap();
        let e = t.diagram_eigen().unwrap();
        assert_eq!(e.rank, 0);
        assert!(e.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_column_among_others() {
        let x = Matrix::from_rows(&[[1.0, 5.0], [2.0, 5.0], [4.0, 5.0]]).unwrap();
        assert_eq!(
            pca_triplet(&x, &uniform_weights(3), true).unwrap_err(),
            Error::ZeroVarianceColumn { column: 1 }
        );
    }

    #[test]
    fn weight_validation() {
        let x = Matrix::zeros(3, 2);
        assert!(matches!(pca_triplet(&x, &[0.5, 0.5, 0.0], false), Err(Error::BadWeights(_))));
        assert!(matches!(pca_triplet(&x, &[0.5, 0.5, 0.5], false), Err(Error::BadWeights(_))));
        assert!(matches!(pca_triplet(&x, &[0.5, 0.5], false), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(
            pca_triplet(&Matrix::zeros(1, 2), &[1.0], false),
            Err(Error::TooFewRows { .. })
        ));
    }

    #[test]
    fn standardized_inertia_is_p() {
        let mut r = rng(21);
        for p in [2, 5, 9] {
            let x = random_matrix(&mut r, 12, p);
            let w = random_weights(&mut r, 12);
            let t = pca_triplet(&x, &w, true).unwrap();
            assert!((t.total_inertia() - p as f64).abs() <= 1e-10);
            let e = t.diagram_eigen().unwrap();
            assert!((e.total() - p as f64).abs() <= 1e-10);
        }
    }

    #[test]
    fn plain_pca_matches_scaled_svd() {
        let mut r = rng(22);
        let n = 10;
        let x = random_matrix(&mut r, n, 4);
        let t = pca_triplet(&x, &uniform_weights(n), false).unwrap();
        let svd = nalgebra::SVD::new(t.x().as_dmatrix().clone(), true, true);
        let e = t.diagram_eigen().unwrap();
        for k in 0..4 {
            let s = svd.singular_values[k];
            assert!((e.values[k] - s * s / n as f64).abs() <= 1e-12);
        }
    }

    #[test]
    fn scores_match_u_sigma() {
        let mut r = rng(23);
        let x = crate::triplet::center_columns_uniform(&random_matrix(&mut r, 10, 4));
        let t = Triplet::new(x.clone(), SpdMatrix::identity(4), SpdMatrix::identity(10)).unwrap();
        let e = t.diagram_eigen().unwrap();
        let scores = principal_components(&t, &e, 4).unwrap();
        let svd = nalgebra::SVD::new(x.as_dmatrix().clone(), true, false);
        let u = svd.u.unwrap();
        for k in 0..4 {
            let us = u.column(k) * svd.singular_values[k];
            let sc = scores.column(k);
            let sign = if us.dot(&sc) >= 0.0 { 1.0 } else { -1.0 };
            assert!((sc - us * sign).norm() <= 1e-9);
        }
        // WD·p = λ·p
        let wd = t.gram_w().as_dmatrix() * t.d().matrix().as_dmatrix();
        for k in 0..4 {
            let p = scores.column(k);
            assert!((&wd * p - p * e.values[k]).norm() <= 1e-9 * e.values[0]);
        }
    }

    #[test]
    fn score_variance_is_lambda() {
        let mut r = rng(24);
        let x = random_matrix(&mut r, 15, 3);
        let w = random_weights(&mut r, 15);
        let t = pca_triplet(&x, &w, false).unwrap();
        let e = t.diagram_eigen().unwrap();
        let s = principal_components(&t, &e, 3).unwrap();
        for k in 0..3 {
            let var: f64 = s.column(k).iter().zip(&w).map(|(v, w)| w * v * v).sum();
            assert!((var - e.values[k]).abs() <= 1e-12);
        }
    }

    #[test]
    fn rank_one_scores_and_limits() {
        let base = [1.0, -2.0, 0.5];
        let mult = [2.0, -1.0, 0.0, 3.0, 1.0];
        let rows: Vec<Vec<f64>> = mult.iter().map(|m| base.iter().map(|b| m * b).collect()).collect();
        let x = Matrix::from_rows(&rows).unwrap();
        let t = Triplet::new(x, SpdMatrix::identity(3), SpdMatrix::identity(5)).unwrap();
        let e = t.diagram_eigen().unwrap();
        assert_eq!(e.rank, 1);
        assert_eq!(principal_components(&t, &e, 0).unwrap().cols(), 0);
        let s = principal_components(&t, &e, 1).unwrap();
        let ratio = s[(0, 0)] / mult[0];
        for (i, m) in mult.iter().enumerate() {
            assert!((s[(i, 0)] - ratio * m).abs() < 1e-12);
        }
        assert_eq!(
            principal_components(&t, &e, 2).unwrap_err(),
            Error::RankExceeded { requested: 2, available: 1 }
        );
    }

    #[test]
    fn column_coordinates_equal_xt_d_w() {
        let mut r = rng(25);
        let x = random_matrix(&mut r, 8, 3);
        let t = Triplet::new(x, random_spd(&mut r, 3), random_spd(&mut r, 8)).unwrap();
        let e = t.diagram_eigen().unwrap();
        let co = column_coordinates(&e, 3).unwrap();
        let xtd = t.x().transpose() * t.d().matrix().as_dmatrix();
        for k in 0..3 {
            let direct: DVector<f64> = &xtd * e.row_vectors.column(k);
            assert!((co.column(k) - direct).norm() <= 1e-10);
        }
    }
}
