//! From smoothed grayscale to physical heights: affine scaling,
//! inversion, two-level thresholding, axis rescaling, and the edge
//! padding that prepares matrices for the pyramid.

use crate::matrix::Matrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HeightError {
    #[error("height range requires zmax > zmin >= 0, got zmin {zmin}, zmax {zmax}")]
    BadRange { zmin: f64, zmax: f64 },
    #[error("matrix value {value} at ({row}, {col}) outside [0, 1]")]
    ValueOutOfUnitRange { row: usize, col: usize, value: f64 },
    #[error("height {value} at ({row}, {col}) is negative")]
    NegativeHeight { row: usize, col: usize, value: f64 },
    #[error("threshold cut must lie in (0, 1), got {0}")]
    BadCut(f64),
    #[error("threshold levels must be >= 0, got low {low}, high {high}")]
    NegativeLevel { low: f64, high: f64 },
    #[error("axis scale factors must be positive, got sx {sx}, sy {sy}")]
    BadScale { sx: f64, sy: f64 },
    #[error("base thickness must be >= 0, got {0}")]
    NegativeBase(f64),
}

/// Heights in millimeters over a rectangular xy grid. `dx`/`dy` are the
/// grid spacing and `base` the base-plate thickness, all in millimeters.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightField {
    matrix: Matrix,
    pub dx: f64,
    pub dy: f64,
    pub base: f64,
}

impl HeightField {
    /// Wrap a matrix of heights (mm) with unit grid spacing. Rejects
    /// negative heights or base.
    pub fn from_heights(matrix: Matrix, base: f64) -> Result<Self, HeightError> {
        if base < 0.0 {
            return Err(HeightError::NegativeBase(base));
        }
        for i in 0..matrix.rows() {
            for j in 0..matrix.cols() {
                let v = matrix.get(i, j);
                if !(v >= 0.0) {
                    return Err(HeightError::NegativeHeight {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Ok(HeightField {
            matrix,
            dx: 1.0,
            dy: 1.0,
            base,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn height(&self, row: usize, col: usize) -> f64 {
        self.matrix.get(row, col)
    }

    pub fn heights(&self) -> &Matrix {
        &self.matrix
    }

    pub fn max_height(&self) -> f64 {
        self.matrix.values().iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// Map unit-range grayscale to heights: `zmin + v (zmax - zmin)`, with
/// `v` replaced by `1 - v` when `invert` is set. Grid spacing starts at
/// 1 mm per pixel; `base` starts at 0.
pub fn gray_to_height(
    m: &Matrix,
    zmin: f64,
    zmax: f64,
    invert: bool,
) -> Result<HeightField, HeightError> {
    if !(zmax > zmin && zmin >= 0.0) {
        return Err(HeightError::BadRange { zmin, zmax });
    }
    let mut out = Matrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.get(i, j);
            if !(0.0..=1.0).contains(&v) {
                return Err(HeightError::ValueOutOfUnitRange {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            let v = if invert { 1.0 - v } else { v };
            out.set(i, j, zmin + v * (zmax - zmin));
        }
    }
    HeightField::from_heights(out, 0.0)
}

/// Two-level posterization: values above `cut` become `high_h`, below
/// become `low_h`. Values exactly at the cut map to `high_h`.
pub fn threshold_filter(
    m: &Matrix,
    cut: f64,
    low_h: f64,
    high_h: f64,
) -> Result<Matrix, HeightError> {
    if !(cut > 0.0 && cut < 1.0) {
        return Err(HeightError::BadCut(cut));
    }
    if low_h < 0.0 || high_h < 0.0 {
        return Err(HeightError::NegativeLevel {
            low: low_h,
            high: high_h,
        });
    }
    let values = m
        .values()
        .iter()
        .map(|&v| if v >= cut { high_h } else { low_h })
        .collect();
    Ok(Matrix::from_vec(m.rows(), m.cols(), values))
}

/// Scale the grid spacing; heights are untouched.
pub fn rescale_axes(hf: &HeightField, sx: f64, sy: f64) -> Result<HeightField, HeightError> {
    if !(sx > 0.0 && sy > 0.0) {
        return Err(HeightError::BadScale { sx, sy });
    }
    let mut out = hf.clone();
    out.dx *= sx;
    out.dy *= sy;
    Ok(out)
}

/// Replicate the last row/column until both dimensions are divisible by
/// `2^rounds`. Original values are unchanged in place; `rounds = 0`
/// returns a copy.
pub fn pad_to_even(m: &Matrix, rounds: u32) -> Matrix {
    let unit = 1usize << rounds.min(63);
    let pad_up = |n: usize| -> usize {
        if n % unit == 0 {
            n
        } else {
            n + (unit - n % unit)
        }
    };
    let (rows, cols) = (pad_up(m.rows()), pad_up(m.cols()));
    if rows == m.rows() && cols == m.cols() {
        return m.clone();
    }
    let mut out = Matrix::zeros(rows, cols);
    for i in 0..rows {
        let src_i = i.min(m.rows() - 1);
        for j in 0..cols {
            out.set(i, j, m.get(src_i, j.min(m.cols() - 1)));
        }
    }
    out
}
