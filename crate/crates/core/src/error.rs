//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid Verblunsky coefficient at index {index}: {reason}")]
    InvalidCoefficient { index: usize, reason: String },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("matrix is not unitary (residual {residual:.3e} exceeds {tol:.3e})")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error(
        "eigensolver failed to converge after {iterations} iterations on block of size {block}"
    )]
    NonConvergence { iterations: usize, block: usize },

    #[error("spectrum is degenerate: eigenvalue gap {gap:.3e} below {tol:.3e}")]
    DegenerateSpectrum { gap: f64, tol: f64 },

    #[error("the first basis vector is not cyclic: {0}")]
    NonCyclic(String),

    #[error("excluded case: {0}")]
    ExcludedCase(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported ensemble specification: {0}")]
    UnsupportedSpec(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
