//! Seeded generators for random matrices, metrics and tables, used by tests
//! and benchmarks. Enabled with the `random` feature.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{spd_check, Matrix, SpdMatrix};
use crate::methods::ContingencyTable;
use crate::triplet::Triplet;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform on `[-1, 1]`.
pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> Matrix {
    let m = DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..=1.0));
    Matrix::from_dmatrix(m).expect("finite")
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let a = random_matrix(rng, n, n);
    Matrix::from_dmatrix((a.as_dmatrix() + a.transpose()) * 0.5).expect("finite")
}

/// A well-conditioned SPD matrix `A·Aᵀ/n + I/2`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> SpdMatrix {
    let a = random_matrix(rng, n, n);
    let m = a.as_dmatrix() * a.transpose() / n as f64 + DMatrix::identity(n, n) * 0.5;
    spd_check(&Matrix::from_dmatrix(m).expect("finite")).expect("SPD by construction")
}

/// Positive weights summing to one.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..=1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// A triplet with uniform random data and random SPD metrics.
pub fn random_triplet<R: Rng>(rng: &mut R, n: usize, p: usize) -> Triplet {
    let x = random_matrix(rng, n, p);
    let q = random_spd(rng, p);
    let d = random_spd(rng, n);
    Triplet::new(x, q, d).expect("compatible dimensions")
}

/// A table of counts in `0..=max_count` whose margins are all positive.
pub fn random_table<R: Rng>(rng: &mut R, rows: usize, cols: usize, max_count: u64) -> ContingencyTable {
    loop {
        let counts: Vec<u64> = (0..rows * cols).map(|_| rng.gen_range(0..=max_count)).collect();
        let row_ok = (0..rows).all(|i| counts[i * cols..(i + 1) * cols].iter().any(|&c| c > 0));
        let col_ok = (0..cols).all(|j| (0..rows).any(|i| counts[i * cols + j] > 0));
        if row_ok && col_ok {
            return ContingencyTable::from_counts(rows, cols, &counts).expect("valid table");
        }
    }
}
