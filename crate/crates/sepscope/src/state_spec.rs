//! The state builder mini-language used by every CLI command:
//!
//! * `ghz:4`           — n-qubit GHZ state (pure)
//! * `w:4`             — n-qubit W state (pure)
//! * `product:0010`    — computational basis state, one digit per site (pure)
//! * `bbo:p1,p2`       — the four-qubit Bell/GHZ/noise mixture (mixed)
//! * `werner:w`        — two-qubit isotropic family (mixed)
//! * `mix:<state>:q`   — isotropic noise admixture on any inner state
//!
//! `mix` nests: `mix:ghz:4:0.3` parses the trailing `:0.3` as the noise
//! degree and the rest as the inner state.

use sepscope_core::states::{
    bbo_state, ghz, isotropic_mix, product_state, w_state, werner, BboParams,
};
use sepscope_core::tensor::{DensityMatrix, PureState, SystemShape};
use std::fmt;

#[derive(Debug)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad state spec: {}", self.0)
    }
}

impl std::error::Error for ParseError {}

/// A built state, remembering whether it is a pure vector.
#[derive(Debug, Clone)]
pub enum BuiltState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl BuiltState {
    pub fn into_density(self) -> DensityMatrix {
        match self {
            BuiltState::Pure(psi) => DensityMatrix::from_pure(&psi),
            BuiltState::Mixed(rho) => rho,
        }
    }

    pub fn shape_n(&self) -> usize {
        match self {
            BuiltState::Pure(psi) => psi.shape().n(),
            BuiltState::Mixed(rho) => rho.shape().n(),
        }
    }
}

fn err(msg: impl Into<String>) -> ParseError {
    ParseError(msg.into())
}

fn parse_f64(s: &str, what: &str) -> Result<f64, ParseError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| err(format!("{what} is not a number: {s:?}")))
}

fn parse_usize(s: &str, what: &str) -> Result<usize, ParseError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| err(format!("{what} is not a count: {s:?}")))
}

pub fn parse_state(spec: &str) -> Result<BuiltState, ParseError> {
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| err(format!("expected kind:args, got {spec:?}")))?;
    match head {
        "ghz" => {
            let n = parse_usize(rest, "ghz size")?;
            Ok(BuiltState::Pure(ghz(n).map_err(|e| err(e.to_string()))?))
        }
        "w" => {
            let n = parse_usize(rest, "w size")?;
            Ok(BuiltState::Pure(w_state(n).map_err(|e| err(e.to_string()))?))
        }
        "product" => {
            let digits: Vec<usize> = rest
                .chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| err(format!("product labels must be digits: {rest:?}")))?;
            if digits.is_empty() {
                return Err(err("product needs at least one digit"));
            }
            let d = digits.iter().copied().max().unwrap().max(1) + 1;
            let shape = SystemShape::new(digits.len(), d.max(2)).map_err(|e| err(e.to_string()))?;
            Ok(BuiltState::Pure(
                product_state(shape, &digits).map_err(|e| err(e.to_string()))?,
            ))
        }
        "bbo" => {
            let (a, b) = rest
                .split_once(',')
                .ok_or_else(|| err("bbo needs p1,p2"))?;
            let params = BboParams::new(parse_f64(a, "p1")?, parse_f64(b, "p2")?)
                .map_err(|e| err(e.to_string()))?;
            Ok(BuiltState::Mixed(bbo_state(params).map_err(|e| err(e.to_string()))?))
        }
        "werner" => {
            let w = parse_f64(rest, "werner weight")?;
            Ok(BuiltState::Mixed(werner(w).map_err(|e| err(e.to_string()))?))
        }
        "mix" => {
            let (inner, q) = rest
                .rsplit_once(':')
                .ok_or_else(|| err("mix needs <state>:q"))?;
            let q = parse_f64(q, "noise degree")?;
            let rho = parse_state(inner)?.into_density();
            Ok(BuiltState::Mixed(
                isotropic_mix(&rho, q).map_err(|e| err(e.to_string()))?,
            ))
        }
        other => Err(err(format!("unknown state kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_mini_language() {
        assert!(matches!(parse_state("ghz:4").unwrap(), BuiltState::Pure(_)));
        assert!(matches!(parse_state("w:3").unwrap(), BuiltState::Pure(_)));
        assert!(matches!(parse_state("product:0000").unwrap(), BuiltState::Pure(_)));
        assert!(matches!(parse_state("bbo:0.2,0.3").unwrap(), BuiltState::Mixed(_)));
        assert!(matches!(parse_state("werner:0.5").unwrap(), BuiltState::Mixed(_)));
        let nested = parse_state("mix:ghz:4:0.25").unwrap();
        assert_eq!(nested.shape_n(), 4);
        assert!(matches!(nested, BuiltState::Mixed(_)));
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["ghz", "ghz:x", "bbo:1", "bbo:0.9,0.9", "mix:ghz:4", "nope:1", "product:ab"] {
            assert!(parse_state(bad).is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn product_infers_local_dimension() {
        let s = parse_state("product:021").unwrap();
        if let BuiltState::Pure(psi) = s {
            assert_eq!(psi.shape().d(), 3);
            assert_eq!(psi.shape().n(), 3);
        } else {
            panic!("expected pure");
        }
    }
}
