//! Monte-Carlo convex-roof estimation.
//!
//! The convex roof of a pure-state measure is an infimum over all
//! decompositions of a mixed state, which is not directly computable.
//! Random decompositions give certified *upper* estimates: every ensemble
//! average is at least the roof. The spectral lower bounds from [`crate::bounds`]
//! sandwich the roof from below, and [`validate_chain`] checks the sandwich
//! never inverts, which is the empirical proxy for the ordering relations
//! the bound construction relies on.
//!
//! Decompositions are drawn by mixing the eigen-ensemble of ρ through a
//! Haar-random isometry, which reaches every decomposition of a given size
//! in the limit.

use crate::bounds::{lambda_bound, BoundError, BoundVariant};
use crate::flips::{enumerate_witnesses, SparseWitness};
use crate::measures::{eta_pure, witness_element, MeasureConfig, MeasureError};
use crate::partitions::{nonempty_subsets, SiteSet};
use crate::random::{derive_seed, haar_unitary, rng_from_seed};
use crate::tensor::{herm_eig, CMat, DensityMatrix, PureState, TensorError};
use crate::Complex64;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RoofError {
    #[error("ensemble size {size} below the state rank {rank}")]
    SizeTooSmall { size: usize, rank: usize },
    #[error("need at least one trial")]
    NoTrials,
    #[error("ensemble does not reconstruct the state (deviation {deviation:e})")]
    BadReconstruction { deviation: f64 },
    #[error("bound chain violated at δ={delta:?}: margin {margin:e}")]
    ChainViolation { delta: Option<Vec<usize>>, margin: f64 },
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// A pure-state decomposition `ρ = Σ_α p_α |ψ_α⟩⟨ψ_α|`.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl Ensemble {
    /// Validates weights (nonnegative, summing to one) and that the
    /// ensemble reconstructs `rho` within 1e-10 max-norm.
    pub fn validated(rho: &DensityMatrix, weights: Vec<f64>, states: Vec<PureState>) -> Result<Self, RoofError> {
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < 0.0) || libm::fabs(total - 1.0) > 1e-12 {
            return Err(RoofError::BadReconstruction {
                deviation: libm::fabs(total - 1.0),
            });
        }
        let dim = rho.dim();
        let mut acc = CMat::zeros(dim);
        for (w, psi) in weights.iter().zip(&states) {
            for i in 0..dim {
                for j in 0..dim {
                    acc.add_at(i, j, psi.amp(i) * psi.amp(j).conj() * *w);
                }
            }
        }
        let deviation = acc.max_abs_diff(rho.mat());
        if deviation > 1e-10 {
            return Err(RoofError::BadReconstruction { deviation });
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    /// `Σ_α p_α f(ψ_α)`.
    pub fn average(&self, mut f: impl FnMut(&PureState) -> f64) -> f64 {
        self.weights.iter().zip(&self.states).map(|(w, s)| w * f(s)).sum()
    }
}

/// Draws a size-`size` decomposition of `rho` by mixing its eigen-ensemble
/// with a Haar-random isometry.
pub fn random_ensemble(rho: &DensityMatrix, size: usize, seed: u64) -> Result<Ensemble, RoofError> {
    let mut rng = rng_from_seed(seed);
    random_ensemble_rng(rho, size, &mut rng)
}

pub fn random_ensemble_rng(
    rho: &DensityMatrix,
    size: usize,
    rng: &mut impl rand::Rng,
) -> Result<Ensemble, RoofError> {
    let (vals, vecs) = herm_eig(rho.mat())?;
    let rank = vals.iter().filter(|&&v| v > 1e-12).count();
    if size < rank {
        return Err(RoofError::SizeTooSmall { size, rank });
    }
    let dim = rho.dim();
    let roots: Vec<f64> = vals[..rank].iter().map(|&v| libm::sqrt(v.max(0.0))).collect();
    let u = haar_unitary(size, rng);
    let mut weights = Vec::with_capacity(size);
    let mut states = Vec::with_capacity(size);
    for alpha in 0..size {
        let mut amps = alloc::vec![Complex64::ZERO; dim];
        for (i, &root) in roots.iter().enumerate() {
            let coeff = u.at(alpha, i) * root;
            for (x, amp) in amps.iter_mut().enumerate() {
                *amp += coeff * vecs.at(x, i);
            }
        }
        let p: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        weights.push(p);
        states.push(PureState::normalized(*rho.shape(), amps)?);
    }
    Ensemble::validated(rho, weights, states)
}

/// `Σ_w |⟨ψ|O_w|ψ*⟩|²` over a pre-enumerated witness list.
fn c2_from_witnesses(psi: &PureState, wits: &[SparseWitness]) -> f64 {
    wits.iter().map(|w| witness_element(psi, w).norm_sqr()).sum()
}

/// Monte-Carlo upper estimate of the convex roof of `C²_{γ,δ}`: the best
/// ensemble average over `trials` random decompositions. Non-increasing in
/// `trials` for a fixed seed because trial seeds are derived per index.
pub fn roof_upper(
    rho: &DensityMatrix,
    gamma: &SiteSet,
    delta: &SiteSet,
    trials: usize,
    size: usize,
    seed: u64,
) -> Result<f64, RoofError> {
    if trials == 0 {
        return Err(RoofError::NoTrials);
    }
    let wits = enumerate_witnesses(rho.shape(), gamma, delta).map_err(BoundError::from)?;
    let mut best = f64::INFINITY;
    for trial in 0..trials {
        let ensemble = random_ensemble(rho, size, derive_seed(seed, trial as u64))?;
        let avg = ensemble.average(|psi| c2_from_witnesses(psi, &wits));
        best = best.min(avg);
    }
    Ok(best)
}

/// Margins of the bound chain for one δ.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaMargin {
    pub delta: SiteSet,
    /// `Λ²_{γ,δ}` under the checked variant.
    pub lambda_sq: f64,
    /// Best sampled ensemble average of `C²_{γ,δ}`.
    pub roof_estimate: f64,
    /// `roof_estimate + tol_gap - lambda_sq`; negative means violation.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub gamma: SiteSet,
    pub per_delta: Vec<DeltaMargin>,
    /// η lower bound from the spectral route.
    pub eta_lower: f64,
    /// Best sampled ensemble average of `η_γ`.
    pub eta_roof_estimate: f64,
    pub eta_margin: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ChainParams {
    pub trials: usize,
    pub ensemble_size: usize,
    pub seed: u64,
    /// Monte-Carlo comparison slack; sampling noise dominates round-off.
    pub tol_gap: f64,
}

impl ChainParams {
    pub fn new(trials: usize, ensemble_size: usize, seed: u64) -> Self {
        Self {
            trials,
            ensemble_size,
            seed,
            tol_gap: 1e-6,
        }
    }
}

/// Checks, per δ, that `Λ²_{γ,δ}` stays below the sampled roof of
/// `C²_{γ,δ}`, and that the η lower bound stays below the sampled roof of
/// `η_γ`. Returns the margins; errs with the offending δ on violation.
pub fn validate_chain(
    rho: &DensityMatrix,
    gamma: &SiteSet,
    variant: BoundVariant,
    params: ChainParams,
    cfg: &MeasureConfig,
) -> Result<ChainReport, RoofError> {
    if params.trials == 0 {
        return Err(RoofError::NoTrials);
    }
    let shape = rho.shape();
    let deltas = nonempty_subsets(&gamma.complement(shape.n()));
    let witness_lists: Vec<Vec<SparseWitness>> = deltas
        .iter()
        .map(|d| enumerate_witnesses(shape, gamma, d).map_err(BoundError::from))
        .collect::<Result<_, _>>()?;

    let mut roof_estimates = alloc::vec![f64::INFINITY; deltas.len()];
    let mut eta_roof_estimate = f64::INFINITY;
    for trial in 0..params.trials {
        let ensemble = random_ensemble(rho, params.ensemble_size, derive_seed(params.seed, trial as u64))?;
        for (est, wits) in roof_estimates.iter_mut().zip(&witness_lists) {
            let avg = ensemble.average(|psi| c2_from_witnesses(psi, wits));
            *est = est.min(avg);
        }
        let mut eta_avg = 0.0;
        for (w, psi) in ensemble.weights().iter().zip(ensemble.states()) {
            eta_avg += w * eta_pure(psi, gamma)?;
        }
        eta_roof_estimate = eta_roof_estimate.min(eta_avg);
    }

    let mut per_delta = Vec::with_capacity(deltas.len());
    for (delta, roof_estimate) in deltas.iter().zip(&roof_estimates) {
        let lam = lambda_bound(rho, gamma, delta, variant)?;
        let lambda_sq = lam * lam;
        let margin = roof_estimate + params.tol_gap - lambda_sq;
        if margin < 0.0 {
            return Err(RoofError::ChainViolation {
                delta: Some(delta.members().to_vec()),
                margin,
            });
        }
        per_delta.push(DeltaMargin {
            delta: delta.clone(),
            lambda_sq,
            roof_estimate: *roof_estimate,
            margin,
        });
    }

    let eta_lower = crate::bounds::eta_bound(rho, gamma, variant, cfg)?;
    let eta_margin = eta_roof_estimate + params.tol_gap - eta_lower;
    if eta_margin < 0.0 {
        return Err(RoofError::ChainViolation {
            delta: None,
            margin: eta_margin,
        });
    }
    Ok(ChainReport {
        gamma: gamma.clone(),
        per_delta,
        eta_lower,
        eta_roof_estimate,
        eta_margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::c2_pure;
    use crate::random::random_density;
    use crate::states::{bell_pair, werner};
    use crate::tensor::{validate_density, SystemShape};

    fn sites(v: &[usize]) -> SiteSet {
        SiteSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn pure_state_ensembles_are_phase_copies() {
        let rho = DensityMatrix::from_pure(&bell_pair());
        let ens = random_ensemble(&rho, 3, 7).unwrap();
        for psi in ens.states() {
            let overlap = crate::tensor::vec_inner(bell_pair().amplitudes(), psi.amplitudes());
            assert!((overlap.norm_sqr() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_qubit_reconstructs() {
        let shape = SystemShape::qubits(1).unwrap();
        let rho = validate_density(CMat::identity(2).scaled(0.5), shape).unwrap();
        let ens = random_ensemble(&rho, 2, 5).unwrap();
        assert_eq!(ens.states().len(), 2);
        assert!(random_ensemble(&rho, 1, 5).is_err());
    }

    #[test]
    fn werner_ensembles_reconstruct() {
        let rho = werner(0.5).unwrap();
        // Validation inside random_ensemble enforces reconstruction.
        random_ensemble(&rho, 6, 99).unwrap();
    }

    #[test]
    fn roof_upper_on_pure_state_is_exact() {
        let rho = DensityMatrix::from_pure(&bell_pair());
        let est = roof_upper(&rho, &sites(&[1]), &sites(&[2]), 3, 3, 11).unwrap();
        let exact = c2_pure(&bell_pair(), &sites(&[1]), &sites(&[2])).unwrap();
        assert!((est - exact).abs() < 1e-10);
    }

    #[test]
    fn roof_upper_is_monotone_in_trials() {
        let mut rng = rng_from_seed(3);
        let shape = SystemShape::qubits(2).unwrap();
        let rho = random_density(shape, &mut rng);
        let mut prev = f64::INFINITY;
        for trials in [1, 5, 20] {
            let est = roof_upper(&rho, &sites(&[1]), &sites(&[2]), trials, 6, 13).unwrap();
            assert!(est <= prev + 1e-15);
            prev = est;
        }
    }

    #[test]
    fn chain_is_trivial_on_pure_products() {
        let shape = SystemShape::qubits(2).unwrap();
        let psi = crate::states::product_state(shape, &[0, 1]).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let report = validate_chain(
            &rho,
            &sites(&[1]),
            BoundVariant::Quadrature,
            ChainParams::new(5, 2, 3),
            &MeasureConfig::calibrated(),
        )
        .unwrap();
        for m in &report.per_delta {
            assert!(m.lambda_sq < 1e-12);
            assert!(m.roof_estimate < 1e-12);
        }
        assert!(report.eta_lower < 1e-12);
        assert!(report.eta_roof_estimate < 1e-12);
    }

    #[test]
    fn chain_holds_on_random_mixed_states() {
        let mut rng = rng_from_seed(61);
        let shape = SystemShape::qubits(2).unwrap();
        let cfg = MeasureConfig::calibrated();
        for _ in 0..3 {
            let rho = random_density(shape, &mut rng);
            let report = validate_chain(
                &rho,
                &sites(&[1]),
                BoundVariant::Quadrature,
                ChainParams::new(40, 6, 17),
                &cfg,
            )
            .unwrap();
            assert!(report.per_delta.iter().all(|m| m.margin >= 0.0));
            assert!(report.eta_margin >= 0.0);
        }
    }

    #[test]
    fn literal_variant_violates_on_bell_projector() {
        let rho = DensityMatrix::from_pure(&bell_pair());
        let err = validate_chain(
            &rho,
            &sites(&[1]),
            BoundVariant::SumLiteral,
            ChainParams::new(5, 3, 23),
            &MeasureConfig::calibrated(),
        )
        .unwrap_err();
        assert!(matches!(err, RoofError::ChainViolation { .. }));
    }
}
