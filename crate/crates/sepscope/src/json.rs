//! JSON forms of states, reports and partition tables.
//!
//! States serialize as `{"n": …, "d": …, "re": […], "im": […]}` with
//! row-major matrix entries; a pure state is recognized by its vector
//! length `d^n` against `d^(2n)` for a density matrix. With `exact` set,
//! the components are emitted as decimal strings that parse back to the
//! identical bits; otherwise as numbers rounded to 12 significant digits.

use crate::round_sig12;
use anyhow::{bail, Context, Result};
use sepscope_core::bounds::BoundReport;
use sepscope_core::measures::RmPureReport;
use sepscope_core::partitions::{OrbitTable, Partition, SitePermutation, SiteSet};
use sepscope_core::roof::ChainReport;
use sepscope_core::tensor::{CMat, DensityMatrix, PureState, SystemShape};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

fn components(values: impl Iterator<Item = f64>, exact: bool) -> Value {
    if exact {
        Value::Array(values.map(|v| Value::String(format!("{v}"))).collect())
    } else {
        json!(values.map(round_sig12).collect::<Vec<f64>>())
    }
}

pub fn pure_state_json(psi: &PureState, exact: bool) -> Value {
    let re = psi.amplitudes().iter().map(|z| z.re);
    let im = psi.amplitudes().iter().map(|z| z.im);
    json!({
        "n": psi.shape().n(),
        "d": psi.shape().d(),
        "re": components(re, exact),
        "im": components(im, exact),
    })
}

pub fn density_json(rho: &DensityMatrix, exact: bool) -> Value {
    let re = rho.mat().entries().iter().map(|z| z.re);
    let im = rho.mat().entries().iter().map(|z| z.im);
    json!({
        "n": rho.shape().n(),
        "d": rho.shape().d(),
        "re": components(re, exact),
        "im": components(im, exact),
    })
}

#[derive(Deserialize)]
struct StateDto {
    n: usize,
    d: usize,
    re: Vec<Value>,
    im: Vec<Value>,
}

fn parse_component(v: &Value) -> Result<f64> {
    match v {
        Value::Number(x) => x.as_f64().context("non-finite component"),
        Value::String(s) => s.parse::<f64>().context("bad decimal string"),
        _ => bail!("state components must be numbers or decimal strings"),
    }
}

/// Reads a state back; returns a density matrix (pure inputs are wrapped
/// as projectors) plus whether the input was a vector.
pub fn state_from_json(value: &Value) -> Result<(DensityMatrix, bool)> {
    let dto: StateDto = serde_json::from_value(value.clone())?;
    let shape = SystemShape::new(dto.n, dto.d)?;
    let dim = shape.total_dim();
    if dto.re.len() != dto.im.len() {
        bail!("re/im length mismatch");
    }
    let comps: Vec<(f64, f64)> = dto
        .re
        .iter()
        .zip(&dto.im)
        .map(|(r, i)| Ok((parse_component(r)?, parse_component(i)?)))
        .collect::<Result<_>>()?;
    if comps.len() == dim {
        let amps = comps
            .iter()
            .map(|&(r, i)| sepscope_core::Complex64::new(r, i))
            .collect();
        let psi = PureState::new(shape, amps)?;
        Ok((DensityMatrix::from_pure(&psi), true))
    } else if comps.len() == dim * dim {
        let re: Vec<f64> = comps.iter().map(|c| c.0).collect();
        let im: Vec<f64> = comps.iter().map(|c| c.1).collect();
        let mat = CMat::from_re_im(dim, &re, &im)?;
        Ok((DensityMatrix::validated(mat, shape)?, false))
    } else {
        bail!("component count {} fits neither a vector nor a matrix", comps.len());
    }
}

pub fn partition_json(p: &Partition) -> Value {
    json!(p
        .blocks()
        .iter()
        .map(|b| b.members().to_vec())
        .collect::<Vec<Vec<usize>>>())
}

pub fn site_set_json(s: &SiteSet) -> Value {
    json!(s.members())
}

pub fn orbit_table_json(t: &OrbitTable) -> Value {
    json!(t
        .entries
        .iter()
        .map(|(rep, mult)| json!({ "representative": partition_json(rep), "multiplicity": mult }))
        .collect::<Vec<Value>>())
}

/// Permutations as image arrays, e.g. `[[2,1,3,4]]`.
pub fn permutations_from_json(value: &Value) -> Result<Vec<SitePermutation>> {
    let arrays: Vec<Vec<usize>> = serde_json::from_value(value.clone())?;
    arrays
        .into_iter()
        .map(|images| SitePermutation::new(images).map_err(Into::into))
        .collect()
}

pub fn rm_pure_report_json(report: &RmPureReport) -> Value {
    json!({
        "m": report.m,
        "Rm": round_sig12(report.rm),
        "per_partition": report.per_partition.iter().map(|p| json!({
            "partition": partition_json(&p.partition),
            "xi": round_sig12(p.xi),
            "per_block_eta": p.per_block_eta.iter().copied().map(round_sig12).collect::<Vec<f64>>(),
        })).collect::<Vec<Value>>(),
    })
}

pub fn bound_report_json(report: &BoundReport) -> Value {
    json!({
        "m": report.m,
        "variant": report.variant.as_str(),
        "rm_tilde": round_sig12(report.rm_tilde),
        "per_partition": report.per_partition.iter().map(|p| json!({
            "partition": partition_json(&p.partition),
            "multiplicity": p.multiplicity,
            "block_sum": round_sig12(p.block_sum),
            "per_block": p.per_block.iter().map(|b| json!({
                "gamma": site_set_json(&b.gamma),
                "eta_lower": round_sig12(b.eta_lower),
            })).collect::<Vec<Value>>(),
        })).collect::<Vec<Value>>(),
        "symmetry": report.symmetry_used.as_ref().map(orbit_table_json),
    })
}

pub fn chain_report_json(report: &ChainReport) -> Value {
    json!({
        "gamma": site_set_json(&report.gamma),
        "per_delta": report.per_delta.iter().map(|m| json!({
            "delta": site_set_json(&m.delta),
            "lambda_sq": round_sig12(m.lambda_sq),
            "roof_estimate": round_sig12(m.roof_estimate),
            "margin": round_sig12(m.margin),
        })).collect::<Vec<Value>>(),
        "eta_lower": round_sig12(report.eta_lower),
        "eta_roof_estimate": round_sig12(report.eta_roof_estimate),
        "eta_margin": round_sig12(report.eta_margin),
    })
}

/// Serializable mirror of a sweep row for JSON consumers (the CSV writer
/// formats rows itself).
#[derive(Serialize)]
pub struct SweepRowDto {
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
    pub r: Option<f64>,
    pub r2: Option<f64>,
    pub r3: Option<f64>,
    pub r4: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use sepscope_core::states::{ghz, werner};

    #[test]
    fn exact_round_trip_is_bitwise() {
        let psi = ghz(3).unwrap();
        let value = pure_state_json(&psi, true);
        let (rho, was_pure) = state_from_json(&value).unwrap();
        assert!(was_pure);
        assert!(rho.mat().max_abs_diff(&DensityMatrix::from_pure(&psi).mat().clone()) == 0.0);
    }

    #[test]
    fn density_round_trip_within_rounding() {
        let rho = werner(0.37).unwrap();
        let (back, was_pure) = state_from_json(&density_json(&rho, true)).unwrap();
        assert!(!was_pure);
        assert_eq!(back.mat().max_abs_diff(rho.mat()), 0.0);

        let (rounded, _) = state_from_json(&density_json(&rho, false)).unwrap();
        assert!(rounded.mat().max_abs_diff(rho.mat()) < 1e-11);
    }

    #[test]
    fn malformed_states_are_rejected() {
        assert!(state_from_json(&json!({"n": 1, "d": 2, "re": [1.0], "im": [0.0]})).is_err());
        assert!(state_from_json(&json!({"n": 1, "d": 2, "re": [1.0, 0.0], "im": [0.0]})).is_err());
    }
}
