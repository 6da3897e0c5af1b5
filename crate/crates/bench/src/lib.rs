//! Fixtures shared by the criterion benchmarks.

use duality_core::random::{random_matrix, random_spd, rng};
use duality_core::{DiagramCollection, SpdMatrix, Triplet};

/// A random triplet with SPD metrics on both sides.
pub fn triplet(seed: u64, n: usize, p: usize) -> Triplet {
    let mut r = rng(seed);
    let x = random_matrix(&mut r, n, p);
    Triplet::new(x, random_spd(&mut r, p), random_spd(&mut r, n)).expect("dimensions match")
}

/// `k` random diagrams on `n` rows with a shared diagonal row metric.
pub fn collection(seed: u64, n: usize, k: usize) -> DiagramCollection {
    let mut r = rng(seed);
    let d = SpdMatrix::diagonal(&vec![1.0 / n as f64; n]).expect("positive weights");
    let diagrams = (0..k)
        .map(|i| {
            let p = 2 + i % 4;
            Triplet::new(random_matrix(&mut r, n, p), random_spd(&mut r, p), d.clone())
                .expect("dimensions match")
        })
        .collect();
    DiagramCollection::new(diagrams, (0..k).map(|i| format!("study{i}")).collect())
        .expect("valid collection")
}
