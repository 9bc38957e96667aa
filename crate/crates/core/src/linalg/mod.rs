//! Exact scalar arithmetic and exact linear algebra over Gaussian rationals.
//!
//! All state data in this crate lives in the field ℚ(i): complex numbers
//! whose real and imaginary parts are arbitrary-precision rationals. Rank
//! and determinant are computed by fraction-free elimination, so every
//! decision downstream is error-free.

mod mat;
mod scalar;

pub use mat::{stack_vec, Mat};
pub use scalar::{GaussianRational, Rational};

pub(crate) use scalar::rational_str;

use thiserror::Error;

/// Errors from matrix construction and exact linear algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry count {got} does not match shape {rows}x{cols}")]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("shape mismatch: expected {expected_rows}x{expected_cols}, got {got_rows}x{got_cols}")]
    ShapeMismatch {
        expected_rows: usize,
        expected_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("ragged rows: row {row} has {got} entries, expected {expected}")]
    RaggedRows { row: usize, expected: usize, got: usize },
    #[error("coefficient count {coeffs} does not match matrix count {mats}")]
    CoefficientCount { coeffs: usize, mats: usize },
    #[error("empty matrix list where at least one matrix is required")]
    EmptyCombination,
}
