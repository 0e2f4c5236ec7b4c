//! Pure-state entanglement quantities: generalized concurrences, the
//! per-cut measure `η_γ`, partition averages `ξ_Γ`, and the `R_m` family.
//!
//! `η_γ` has two routes. The authoritative one is the linear-entropy form
//! `N(|γ|)(1 - Tr ρ_γ²)` with `N(g) = d^g/(d^g - 1)`. The second route sums
//! squared witness matrix elements over every flip family of the cut:
//!
//! ```text
//! Σ_{s ⊆ γ} Σ_{δ ⊆ γ̄} C²_{s,δ}(ψ)  =  2 (1 - Tr ρ_γ²)
//! ```
//!
//! (both subsets nonempty). Each witness element is a 2x2 minor of the
//! amplitude matrix across the cut, every minor appears in exactly one
//! (s, δ, assignment) family, and the label sum counts it four times; the
//! squared-minor expansion of `1 - Tr ρ_γ²` then gives the constant 2.
//! [`calibrate_eta`] re-derives that constant empirically and refuses to
//! proceed if it is not constant, which would signal a wrong enumeration.

use crate::flips::{enumerate_witnesses, FlipError, SparseWitness};
use crate::partitions::{nonempty_subsets, set_partitions, stirling, Partition, PartitionError, SiteSet};
use crate::random::{random_pure, rng_from_seed};
use crate::tensor::{marginal_purity, PureState, SystemShape, TensorError};
use crate::Complex64;
use alloc::vec::Vec;
use thiserror::Error;

/// Factors this close to zero short-circuit geometric means to exact zero.
pub const ZERO_FACTOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("γ must be a proper nonempty subset of the sites")]
    FullSetError,
    #[error("partition must have at least two blocks")]
    TrivialPartition,
    #[error("partition does not match the system shape")]
    InvalidPartition,
    #[error("block count out of range: need 1 <= m <= n, got m={m}, n={n}")]
    InvalidRange { m: usize, n: usize },
    #[error("sample count {0} too small for calibration (need >= 100)")]
    TooFewSamples(usize),
    #[error(
        "concurrence-sum to linear-entropy ratio is not constant for d={d}, |γ|={gamma_size}: \
         spread [{min}, {max}]"
    )]
    CalibrationInconsistent {
        d: usize,
        gamma_size: usize,
        min: f64,
        max: f64,
    },
    #[error(transparent)]
    Flip(#[from] FlipError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

/// `⟨ψ|O|ψ*⟩` for a sparse witness: a signed sum of conjugated amplitude
/// products.
pub fn witness_element(psi: &PureState, witness: &SparseWitness) -> Complex64 {
    witness
        .terms()
        .iter()
        .map(|t| psi.amp(t.row).conj() * psi.amp(t.col).conj() * t.sign as f64)
        .sum()
}

/// Squared generalized concurrence of the (γ, δ) family:
/// `Σ_w |⟨ψ|O_w|ψ*⟩|²`. Zero exactly when every cut minor touched by the
/// family vanishes; in particular zero for states product across γ | γ̄.
pub fn c2_pure(psi: &PureState, gamma: &SiteSet, delta: &SiteSet) -> Result<f64, MeasureError> {
    let wits = enumerate_witnesses(psi.shape(), gamma, delta)?;
    Ok(wits.iter().map(|w| witness_element(psi, w).norm_sqr()).sum())
}

/// Normalization `N(g) = d^g / (d^g - 1)` that makes `η = 1` on maximally
/// mixed marginals.
pub fn eta_normalization(d: usize, gamma_size: usize) -> f64 {
    let dg = libm::pow(d as f64, gamma_size as f64);
    dg / (dg - 1.0)
}

fn check_proper(shape: &SystemShape, gamma: &SiteSet) -> Result<(), MeasureError> {
    if gamma.is_empty() || gamma.len() >= shape.n() {
        return Err(MeasureError::FullSetError);
    }
    Ok(())
}

/// `η_γ(ψ) = N(|γ|)(1 - Tr ρ_γ²)` via the reduced state. This is the
/// authoritative definition; the concurrence route below must agree with
/// it once calibrated.
pub fn eta_pure(psi: &PureState, gamma: &SiteSet) -> Result<f64, MeasureError> {
    check_proper(psi.shape(), gamma)?;
    let p = marginal_purity(psi, gamma)?;
    Ok(eta_normalization(psi.shape().d(), gamma.len()) * (1.0 - p).max(0.0))
}

/// Raw double sum `Σ_{s ⊆ γ} Σ_{δ ⊆ γ̄} C²_{s,δ}(ψ)` over nonempty subsets.
pub fn concurrence_cut_sum(psi: &PureState, gamma: &SiteSet) -> Result<f64, MeasureError> {
    check_proper(psi.shape(), gamma)?;
    let complement = gamma.complement(psi.shape().n());
    let mut total = 0.0;
    for s in nonempty_subsets(gamma) {
        for delta in nonempty_subsets(&complement) {
            total += c2_pure(psi, &s, &delta)?;
        }
    }
    Ok(total)
}

/// How the concurrence sum is scaled to an `η` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// The raw concurrence sum, no scaling at all.
    PaperLiteral,
    /// `calibration_factor · N(|γ|) ·` sum, matching the linear-entropy η.
    EntropyCalibrated,
}

/// Scaling policy for the concurrence route; see [`calibrate_eta`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureConfig {
    pub normalization: Normalization,
    pub calibration_factor: f64,
}

impl MeasureConfig {
    /// The production configuration: the cut sum equals twice the linear
    /// entropy, so the factor is 1/2 for every d and |γ|. Verified at
    /// runtime by [`calibrate_eta`].
    pub fn calibrated() -> Self {
        Self {
            normalization: Normalization::EntropyCalibrated,
            calibration_factor: 0.5,
        }
    }

    pub fn paper_literal() -> Self {
        Self {
            normalization: Normalization::PaperLiteral,
            calibration_factor: 1.0,
        }
    }

    pub fn eta_scale(&self, d: usize, gamma_size: usize) -> f64 {
        match self.normalization {
            Normalization::PaperLiteral => 1.0,
            Normalization::EntropyCalibrated => self.calibration_factor * eta_normalization(d, gamma_size),
        }
    }
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self::calibrated()
    }
}

/// `η_γ` through the concurrence route under `cfg`; with the calibrated
/// configuration this equals [`eta_pure`] up to round-off.
pub fn eta_via_concurrences(
    psi: &PureState,
    gamma: &SiteSet,
    cfg: &MeasureConfig,
) -> Result<f64, MeasureError> {
    let sum = concurrence_cut_sum(psi, gamma)?;
    Ok(cfg.eta_scale(psi.shape().d(), gamma.len()) * sum)
}

/// Per-(d, |γ|) ratio of the concurrence sum to the linear entropy.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationGroup {
    pub d: usize,
    pub gamma_size: usize,
    pub samples: usize,
    pub ratio: f64,
    pub spread: f64,
}

/// Result of a calibration run: the fitted configuration plus the fitted
/// ratio per group and whether one global constant covers all groups.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOutcome {
    pub config: MeasureConfig,
    pub groups: Vec<CalibrationGroup>,
    pub global_constant: bool,
}

const RATIO_REL_TOL: f64 = 1e-8;

/// Fits the constant relating the concurrence cut sum to `1 - Tr ρ_γ²`
/// over `samples` random pure states per shape and every proper γ.
///
/// Errors with [`MeasureError::CalibrationInconsistent`] when the ratio is
/// not constant within 1e-8 relative inside any (d, |γ|) group — the
/// signal that the witness enumeration reads the flip summation wrongly.
/// Product-degenerate draws (linear entropy below 1e-12) are excluded.
pub fn calibrate_eta(
    samples: usize,
    shapes: &[SystemShape],
    seed: u64,
) -> Result<CalibrationOutcome, MeasureError> {
    if samples < 100 {
        return Err(MeasureError::TooFewSamples(samples));
    }
    struct Acc {
        min: f64,
        max: f64,
        sum: f64,
        count: usize,
    }
    let mut groups: alloc::collections::BTreeMap<(usize, usize), Acc> = alloc::collections::BTreeMap::new();
    let mut rng = rng_from_seed(seed);
    for shape in shapes {
        let gammas: Vec<SiteSet> = nonempty_subsets(&SiteSet::full(shape.n()))
            .into_iter()
            .filter(|g| g.len() < shape.n())
            .collect();
        for _ in 0..samples {
            let psi = random_pure(*shape, &mut rng);
            for gamma in &gammas {
                let entropy = 1.0 - marginal_purity(&psi, gamma)?;
                if entropy < 1e-12 {
                    continue;
                }
                let ratio = concurrence_cut_sum(&psi, gamma)? / entropy;
                let acc = groups.entry((shape.d(), gamma.len())).or_insert(Acc {
                    min: f64::INFINITY,
                    max: f64::NEG_INFINITY,
                    sum: 0.0,
                    count: 0,
                });
                acc.min = acc.min.min(ratio);
                acc.max = acc.max.max(ratio);
                acc.sum += ratio;
                acc.count += 1;
            }
        }
    }
    let mut out_groups = Vec::new();
    for (&(d, gamma_size), acc) in &groups {
        let mean = acc.sum / acc.count as f64;
        let spread = (acc.max - acc.min) / mean.max(f64::MIN_POSITIVE);
        if spread > RATIO_REL_TOL {
            return Err(MeasureError::CalibrationInconsistent {
                d,
                gamma_size,
                min: acc.min,
                max: acc.max,
            });
        }
        out_groups.push(CalibrationGroup {
            d,
            gamma_size,
            samples: acc.count,
            ratio: mean,
            spread,
        });
    }
    let grand_mean = out_groups.iter().map(|g| g.ratio).sum::<f64>() / out_groups.len().max(1) as f64;
    let global_constant = out_groups
        .iter()
        .all(|g| libm::fabs(g.ratio - grand_mean) <= RATIO_REL_TOL * grand_mean);
    Ok(CalibrationOutcome {
        config: MeasureConfig {
            normalization: Normalization::EntropyCalibrated,
            calibration_factor: 1.0 / grand_mean,
        },
        groups: out_groups,
        global_constant,
    })
}

/// Arithmetic block average `ξ_Γ(ψ) = (1/m) Σ_i η_{γ_i}(ψ)`.
pub fn xi_pure(psi: &PureState, partition: &Partition) -> Result<f64, MeasureError> {
    if partition.block_count() < 2 {
        return Err(MeasureError::TrivialPartition);
    }
    if partition.n() != psi.shape().n() {
        return Err(MeasureError::InvalidPartition);
    }
    let mut sum = 0.0;
    for block in partition.blocks() {
        sum += eta_pure(psi, block)?;
    }
    Ok(sum / partition.block_count() as f64)
}

/// Per-partition detail of an `R_m` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionXi {
    pub partition: Partition,
    pub xi: f64,
    pub per_block_eta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmPureReport {
    pub m: usize,
    pub rm: f64,
    pub per_partition: Vec<PartitionXi>,
}

/// Geometric mean over the factors, in log space, with exact-zero
/// short-circuit on any factor below [`ZERO_FACTOR`].
pub(crate) fn geometric_mean(factors: impl Iterator<Item = (f64, f64)>, total_weight: f64) -> f64 {
    let mut log_sum = 0.0;
    for (factor, weight) in factors {
        if factor < ZERO_FACTOR {
            return 0.0;
        }
        log_sum += weight * libm::log(factor);
    }
    libm::exp(log_sum / total_weight)
}

/// `R_m(ψ)`: geometric mean of `ξ_Γ` over all partitions with m blocks.
///
/// `m = 1` returns 0 by convention (the η of the full site set is an empty
/// sum); `m = 0` or `m > n` is an error.
pub fn rm_pure(psi: &PureState, m: usize) -> Result<RmPureReport, MeasureError> {
    let n = psi.shape().n();
    if m == 0 || m > n {
        return Err(MeasureError::InvalidRange { m, n });
    }
    if m == 1 {
        return Ok(RmPureReport {
            m,
            rm: 0.0,
            per_partition: Vec::new(),
        });
    }
    let partitions = set_partitions(n, m)?;
    debug_assert_eq!(partitions.len() as u64, stirling(n, m).unwrap());
    let mut per_partition = Vec::with_capacity(partitions.len());
    for partition in partitions {
        let per_block_eta = partition
            .blocks()
            .iter()
            .map(|b| eta_pure(psi, b))
            .collect::<Result<Vec<f64>, _>>()?;
        let xi = per_block_eta.iter().sum::<f64>() / m as f64;
        per_partition.push(PartitionXi {
            partition,
            xi,
            per_block_eta,
        });
    }
    let count = per_partition.len() as f64;
    let rm = geometric_mean(per_partition.iter().map(|p| (p.xi, 1.0)), count);
    Ok(RmPureReport { m, rm, per_partition })
}
