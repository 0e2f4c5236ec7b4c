//! Multipartite entanglement quantification for n-qudit systems.
//!
//! This crate computes the `R_m` family of entanglement measures for pure
//! states and an analytically computable lower bound `R̃_m` for mixed states.
//! The building blocks are generalized concurrences: sums of squared matrix
//! elements `⟨ψ|O|ψ*⟩` over a family of sparse flip-witness operators, one
//! family per pair of disjoint site subsets (γ, δ). Aggregation proceeds as
//!
//! * `η_γ` — entanglement of the cut γ|γ̄, equal to a normalized linear
//!   entropy of the reduced state on γ,
//! * `ξ_Γ` — arithmetic mean of `η` over the blocks of a partition Γ,
//! * `R_m` — geometric mean of `ξ_Γ` over all partitions with m blocks.
//!
//! For mixed states the convex roof of `R_m` is not computable; [`bounds`]
//! provides the spectral lower bound built from `√(ρρ̃(O))` per witness,
//! and [`roof`] provides Monte-Carlo upper estimates used to validate the
//! bound chain empirically.
//!
//! The crate is `no_std` (with `alloc`); all operations are pure functions
//! of their inputs and values are immutable after construction, so
//! everything is safe to share read-only across threads.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod bounds;
pub mod flips;
pub mod measures;
pub mod partitions;
pub mod random;
pub mod roof;
pub mod states;
pub mod tensor;

pub use num_complex::Complex64;

/// Tolerance for Hermiticity deviations (max-norm of `A − A†`).
pub const TOL_HERM: f64 = 1e-9;
/// Tolerance for trace-one checks on density matrices.
pub const TOL_TRACE: f64 = 1e-9;
/// Tolerance for unit-norm checks on pure states.
pub const TOL_NORM: f64 = 1e-9;
/// Per-dimension factor for the PSD tolerance: eigenvalues above
/// `-TOL_PSD_PER_DIM · dim` count as nonnegative and are clamped to zero.
pub const TOL_PSD_PER_DIM: f64 = 1e-10;
/// Tolerance for eigendecomposition reconstruction residuals.
pub const TOL_EIG: f64 = 1e-10;
