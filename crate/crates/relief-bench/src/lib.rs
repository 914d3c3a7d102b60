//! Shared fixtures for the pipeline benchmarks.

use relief_core::matrix::Matrix;

/// Deterministic pseudo-random matrix (xorshift, unit range).
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut state = seed | 1;
    let values = (0..rows * cols)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    Matrix::from_vec(rows, cols, values)
}

/// Deterministic pseudo-random signal in [-1, 1].
pub fn random_signal(len: usize, seed: u64) -> Vec<f64> {
    random_matrix(1, len, seed)
        .into_values()
        .into_iter()
        .map(|v| 2.0 * v - 1.0)
        .collect()
}
