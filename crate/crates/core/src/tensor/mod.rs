//! Multi-qudit index arithmetic and dense complex linear algebra.

mod density;
mod eig;
mod matrix;
mod shape;

pub use density::{
    marginal_purity, partial_trace, purity, reduced_density_pure, validate_density, DensityMatrix,
};
pub use eig::{from_eig, herm_eig, sqrt_psd};
pub use matrix::{vec_inner, vec_norm, CMat, PureState};
pub use shape::{BasisLabel, SystemShape, MAX_DIM};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("invalid system shape: n={n}, d={d} (need n >= 1, d >= 2, d^n <= 2^20)")]
    InvalidShape { n: usize, d: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("vector norm is {norm}, expected 1")]
    NormNotOne { norm: f64 },
    #[error("non-finite entries")]
    NotFinite,
    #[error("site {site} out of range 1..={n}")]
    SiteOutOfRange { site: usize, n: usize },
    #[error("level {level} out of range 0..{d}")]
    LevelOutOfRange { level: usize, d: usize },
    #[error("subset of sites must be nonempty")]
    EmptySubset,
    #[error("eigensolver failed to converge")]
    ConvergenceFailure,
}
