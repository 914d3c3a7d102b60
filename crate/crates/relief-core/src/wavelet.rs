//! Filter banks for smoothing: 2D Haar block averaging, the
//! Daubechies-4 low/high pass pair, separable 2D filtering, and the
//! multiresolution pyramid.
//!
//! All 1D filters use periodic (circular) extension at the boundaries,
//! which keeps the orthonormality identities exact. Each filtering pass
//! decimates by two, so signals must have even length and matrices even
//! dimensions; [`crate::heightmap::pad_to_even`] prepares arbitrary sizes.

use crate::heightmap::pad_to_even;
use crate::matrix::Matrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WaveletError {
    #[error("signal length {len} is below the minimum {min}")]
    SignalTooShort { len: usize, min: usize },
    #[error("signal length {len} is odd; decimation by two needs an even length")]
    OddLength { len: usize },
    #[error("matrix dimensions {rows}x{cols} violate the even/minimum-size requirement (min {min})")]
    BadDimensions { rows: usize, cols: usize, min: usize },
    #[error("{rounds} rounds would shrink a {rows}x{cols} matrix below the kernel minimum")]
    TooManyRounds { rounds: u32, rows: usize, cols: usize },
    #[error("spike threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
}

/// A named low-pass/high-pass coefficient pair with starting index offsets.
///
/// The low-pass output is `sum_i h[i] * s[2k + low_offset + i]` and the
/// high-pass output `sum_i g[i] * s[2k + high_offset + i]`, indices taken
/// modulo the signal length.
#[derive(Debug, Clone)]
pub struct FilterBank {
    pub name: &'static str,
    pub lowpass: Vec<f64>,
    pub low_offset: isize,
    pub highpass: Vec<f64>,
    pub high_offset: isize,
}

impl FilterBank {
    /// Daubechies-4 filters from the closed forms `(1 ± √3)/(4√2)` and
    /// `(3 ± √3)/(4√2)`, so the orthonormality identities hold to machine
    /// precision. The high-pass stencil starts at offset −2.
    pub fn daubechies4() -> Self {
        let s3 = 3.0_f64.sqrt();
        let d = 4.0 * 2.0_f64.sqrt();
        FilterBank {
            name: "daubechies4",
            lowpass: vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d],
            low_offset: 0,
            highpass: vec![(1.0 - s3) / d, -(3.0 - s3) / d, (3.0 + s3) / d, -(1.0 + s3) / d],
            high_offset: -2,
        }
    }

    /// Orthonormal Haar pair (1D). The pyramid's 2×2 block averaging uses
    /// the plain mean instead; see [`haar_block_average`].
    pub fn haar() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        FilterBank {
            name: "haar",
            lowpass: vec![r, r],
            low_offset: 0,
            highpass: vec![r, -r],
            high_offset: 0,
        }
    }
}

/// Smoothing kernel selector for [`pyramid_smooth`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// Plain 2×2 block mean.
    Haar,
    /// Separable Daubechies-4 low pass.
    D4,
}

/// Which half of a filter bank to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Low,
    High,
}

/// One decimating filter pass with periodic extension.
fn apply_periodic(signal: &[f64], coeffs: &[f64], offset: isize) -> Vec<f64> {
    let n = signal.len() as isize;
    (0..n / 2)
        .map(|k| {
            coeffs
                .iter()
                .enumerate()
                .map(|(i, &c)| {
                    let idx = (2 * k + offset + i as isize).rem_euclid(n);
                    c * signal[idx as usize]
                })
                .sum()
        })
        .collect()
}

fn check_signal(signal: &[f64], min: usize) -> Result<(), WaveletError> {
    if signal.len() < min {
        return Err(WaveletError::SignalTooShort {
            len: signal.len(),
            min,
        });
    }
    if signal.len() % 2 != 0 {
        return Err(WaveletError::OddLength { len: signal.len() });
    }
    Ok(())
}

/// Daubechies-4 low-pass: `(Hs)_k = h0 s_{2k} + h1 s_{2k+1} + h2 s_{2k+2} + h3 s_{2k+3}`,
/// periodic at the end. Output has half the length.
pub fn d4_lowpass(signal: &[f64]) -> Result<Vec<f64>, WaveletError> {
    check_signal(signal, 4)?;
    let fb = FilterBank::daubechies4();
    Ok(apply_periodic(signal, &fb.lowpass, fb.low_offset))
}

/// Daubechies-4 high-pass: `(Gs)_k = g_{-2} s_{2k-2} + g_{-1} s_{2k-1} + g_0 s_{2k} + g_1 s_{2k+1}`,
/// periodic on both ends. Output has half the length.
pub fn d4_highpass(signal: &[f64]) -> Result<Vec<f64>, WaveletError> {
    check_signal(signal, 4)?;
    let fb = FilterBank::daubechies4();
    Ok(apply_periodic(signal, &fb.highpass, fb.high_offset))
}

/// Replace every 2×2 block with the mean of its four values, halving both
/// dimensions. Both dimensions must be even.
pub fn haar_block_average(m: &Matrix) -> Result<Matrix, WaveletError> {
    if m.rows() % 2 != 0 || m.cols() % 2 != 0 || m.rows() < 2 || m.cols() < 2 {
        return Err(WaveletError::BadDimensions {
            rows: m.rows(),
            cols: m.cols(),
            min: 2,
        });
    }
    let (out_rows, out_cols) = (m.rows() / 2, m.cols() / 2);
    let mut out = Matrix::zeros(out_rows, out_cols);
    for i in 0..out_rows {
        for j in 0..out_cols {
            let sum = m.get(2 * i, 2 * j)
                + m.get(2 * i, 2 * j + 1)
                + m.get(2 * i + 1, 2 * j)
                + m.get(2 * i + 1, 2 * j + 1);
            out.set(i, j, sum / 4.0);
        }
    }
    Ok(out)
}

/// Apply the chosen 1D band to every row, then to every column of the
/// result. Output is `(rows/2) x (cols/2)`.
pub fn separable_filter_2d(m: &Matrix, fb: &FilterBank, band: Band) -> Result<Matrix, WaveletError> {
    let (coeffs, offset) = match band {
        Band::Low => (&fb.lowpass, fb.low_offset),
        Band::High => (&fb.highpass, fb.high_offset),
    };
    let min = coeffs.len().max(2);
    if m.rows() % 2 != 0 || m.cols() % 2 != 0 || m.rows() < min || m.cols() < min {
        return Err(WaveletError::BadDimensions {
            rows: m.rows(),
            cols: m.cols(),
            min,
        });
    }

    // Row pass: rows x cols -> rows x cols/2.
    let half_cols = m.cols() / 2;
    let mut row_pass = Matrix::zeros(m.rows(), half_cols);
    for i in 0..m.rows() {
        let filtered = apply_periodic(m.row(i), coeffs, offset);
        for (j, v) in filtered.into_iter().enumerate() {
            row_pass.set(i, j, v);
        }
    }

    // Column pass: rows x cols/2 -> rows/2 x cols/2.
    let half_rows = m.rows() / 2;
    let mut out = Matrix::zeros(half_rows, half_cols);
    let mut column = vec![0.0; m.rows()];
    for j in 0..half_cols {
        for i in 0..m.rows() {
            column[i] = row_pass.get(i, j);
        }
        let filtered = apply_periodic(&column, coeffs, offset);
        for (i, v) in filtered.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

fn kernel_min(kernel: Kernel) -> usize {
    match kernel {
        Kernel::Haar => 2,
        Kernel::D4 => 4,
    }
}

/// Repeated 2D smoothing: pad to a multiple of `2^rounds` by edge
/// replication, then apply the chosen kernel `rounds` times. Each round
/// halves both dimensions; `rounds = 0` is the identity.
pub fn pyramid_smooth(m: &Matrix, rounds: u32, kernel: Kernel) -> Result<Matrix, WaveletError> {
    let mut cur = pad_to_even(m, rounds);
    let min = kernel_min(kernel);
    for _ in 0..rounds {
        if cur.rows() < min || cur.cols() < min {
            return Err(WaveletError::TooManyRounds {
                rounds,
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        cur = match kernel {
            Kernel::Haar => haar_block_average(&cur)?,
            Kernel::D4 => separable_filter_2d(&cur, &FilterBank::daubechies4(), Band::Low)?,
        };
    }
    Ok(cur)
}

/// Indices where the magnitude of the D4 high-pass response exceeds
/// `threshold`, in ascending order. High-pass output index `k` corresponds
/// to input positions around `2k`.
pub fn detect_spikes(signal: &[f64], threshold: f64) -> Result<Vec<usize>, WaveletError> {
    if threshold <= 0.0 {
        return Err(WaveletError::NonPositiveThreshold(threshold));
    }
    let detail = d4_highpass(signal)?;
    Ok(detail
        .iter()
        .enumerate()
        .filter(|(_, d)| d.abs() > threshold)
        .map(|(k, _)| k)
        .collect())
}
