//! Validation campaigns: Monte-Carlo checks that the spectral lower
//! bounds never cross the sampled convex-roof estimates.

use anyhow::Result;
use rayon::prelude::*;
use sepscope_core::bounds::BoundVariant;
use sepscope_core::measures::MeasureConfig;
use sepscope_core::partitions::{nonempty_subsets, SiteSet};
use sepscope_core::random::{derive_seed, random_density, rng_from_seed};
use sepscope_core::roof::{validate_chain, ChainParams, ChainReport, RoofError};
use sepscope_core::tensor::SystemShape;

#[derive(Debug, Clone)]
pub struct ChainCampaignSpec {
    pub seed: u64,
    pub trials: usize,
    pub two_qubit_states: usize,
    pub three_qubit_states: usize,
    pub variant: BoundVariant,
    pub tol_gap: f64,
}

impl ChainCampaignSpec {
    pub fn new(seed: u64, trials: usize, variant: BoundVariant) -> Self {
        Self {
            seed,
            trials,
            two_qubit_states: 50,
            three_qubit_states: 25,
            variant,
            tol_gap: 1e-6,
        }
    }
}

#[derive(Debug)]
pub struct StateOutcome {
    pub n: usize,
    pub state_index: usize,
    pub reports: Vec<ChainReport>,
    pub violations: Vec<String>,
}

#[derive(Debug)]
pub struct CampaignOutcome {
    pub states: Vec<StateOutcome>,
    pub violation_count: usize,
    /// Smallest per-δ margin seen anywhere (how close the chain came to
    /// inverting).
    pub min_margin: f64,
}

/// Runs the bound chain over random mixed states of two and three qubits.
/// States are independent tasks; every random draw derives its seed from
/// the campaign seed and the state index, so the outcome does not depend
/// on scheduling.
pub fn run_chain_campaign(spec: &ChainCampaignSpec) -> Result<CampaignOutcome> {
    let cfg = MeasureConfig::calibrated();
    let mut tasks = Vec::new();
    for i in 0..spec.two_qubit_states {
        tasks.push((2usize, i));
    }
    for i in 0..spec.three_qubit_states {
        tasks.push((3usize, i));
    }
    let states: Vec<StateOutcome> = tasks
        .par_iter()
        .map(|&(n, state_index)| -> Result<StateOutcome> {
            let shape = SystemShape::qubits(n)?;
            let tag = (n as u64) << 32 | state_index as u64;
            let mut rng = rng_from_seed(derive_seed(spec.seed, tag));
            let rho = random_density(shape, &mut rng);
            let mut reports = Vec::new();
            let mut violations = Vec::new();
            for (g_index, gamma) in proper_subsets(n).into_iter().enumerate() {
                let params = ChainParams {
                    trials: spec.trials,
                    ensemble_size: shape.total_dim(),
                    seed: derive_seed(spec.seed, tag ^ (g_index as u64) << 48),
                    tol_gap: spec.tol_gap,
                };
                match validate_chain(&rho, &gamma, spec.variant, params, &cfg) {
                    Ok(report) => reports.push(report),
                    Err(RoofError::ChainViolation { delta, margin }) => {
                        violations.push(format!(
                            "n={n} state={state_index} γ={:?} δ={delta:?} margin={margin:e}",
                            gamma.members()
                        ));
                    }
                    Err(other) => return Err(other.into()),
                }
            }
            Ok(StateOutcome {
                n,
                state_index,
                reports,
                violations,
            })
        })
        .collect::<Result<_>>()?;

    let violation_count = states.iter().map(|s| s.violations.len()).sum();
    let min_margin = states
        .iter()
        .flat_map(|s| s.reports.iter())
        .flat_map(|r| r.per_delta.iter().map(|d| d.margin).chain([r.eta_margin]))
        .fold(f64::INFINITY, f64::min);
    Ok(CampaignOutcome {
        states,
        violation_count,
        min_margin,
    })
}

fn proper_subsets(n: usize) -> Vec<SiteSet> {
    nonempty_subsets(&SiteSet::full(n))
        .into_iter()
        .filter(|g| g.len() < n)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_campaign_passes() {
        let spec = ChainCampaignSpec {
            seed: 5,
            trials: 20,
            two_qubit_states: 3,
            three_qubit_states: 1,
            variant: BoundVariant::Quadrature,
            tol_gap: 1e-6,
        };
        let outcome = run_chain_campaign(&spec).unwrap();
        assert_eq!(outcome.violation_count, 0);
        assert!(outcome.min_margin >= 0.0);
        assert_eq!(outcome.states.len(), 4);
    }
}
