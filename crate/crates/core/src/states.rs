//! Constructors for reference states: GHZ and W states, Bell pairs, the
//! noisy four-qubit Bell/GHZ mixture family, and isotropic noise mixing.

use crate::tensor::{CMat, DensityMatrix, PureState, SystemShape, TensorError};
use crate::Complex64;
use alloc::vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("constructor argument out of range: {0}")]
    InvalidRange(&'static str),
    #[error("invalid weights p1={p1}, p2={p2}: need p1, p2 >= 0 and p1 + p2 <= 1")]
    InvalidWeights { p1: f64, p2: f64 },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// `(|0...0⟩ + |1...1⟩)/√2` on `n` qubits.
pub fn ghz(n: usize) -> Result<PureState, StateError> {
    if n < 2 {
        return Err(StateError::InvalidRange("ghz needs n >= 2"));
    }
    let shape = SystemShape::qubits(n)?;
    let dim = shape.total_dim();
    let mut amps = vec![Complex64::ZERO; dim];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[dim - 1] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Ok(PureState::new(shape, amps)?)
}

/// `(|10...0⟩ + |010...0⟩ + ... + |0...01⟩)/√n`.
pub fn w_state(n: usize) -> Result<PureState, StateError> {
    if n < 2 {
        return Err(StateError::InvalidRange("w_state needs n >= 2"));
    }
    let shape = SystemShape::qubits(n)?;
    let amp = Complex64::new(1.0 / libm::sqrt(n as f64), 0.0);
    let mut amps = vec![Complex64::ZERO; shape.total_dim()];
    for site in 1..=n {
        amps[shape.place(site)] = amp;
    }
    Ok(PureState::new(shape, amps)?)
}

/// Computational basis state with the given digits.
pub fn product_state(shape: SystemShape, digits: &[usize]) -> Result<PureState, StateError> {
    let index = shape.digits_to_index(digits)?;
    let mut amps = vec![Complex64::ZERO; shape.total_dim()];
    amps[index] = Complex64::ONE;
    Ok(PureState::new(shape, amps)?)
}

/// The two-qubit Bell state `(|00⟩ + |11⟩)/√2`.
pub fn bell_pair() -> PureState {
    ghz(2).unwrap()
}

/// Projector onto the Bell state of the qubit pair `(i, j)` of `shape`,
/// as a state of that two-site subsystem. Composition onto the full
/// register goes through [`bell_pair_chain`].
pub fn bell_pair_projector(shape: &SystemShape, i: usize, j: usize) -> Result<DensityMatrix, StateError> {
    shape.check_site(i)?;
    shape.check_site(j)?;
    if i == j {
        return Err(StateError::InvalidRange("bell pair needs two distinct sites"));
    }
    if shape.d() != 2 {
        return Err(StateError::InvalidRange("bell pair needs qubits"));
    }
    Ok(DensityMatrix::from_pure(&bell_pair()))
}

/// Pure product of Bell pairs on disjoint site pairs covering the register:
/// amplitude of `|x⟩` is the product of the pair amplitudes.
pub fn bell_pair_chain(shape: SystemShape, pairs: &[(usize, usize)]) -> Result<PureState, StateError> {
    if shape.d() != 2 {
        return Err(StateError::InvalidRange("bell pairs need qubits"));
    }
    let mut covered = vec![false; shape.n() + 1];
    for &(i, j) in pairs {
        shape.check_site(i)?;
        shape.check_site(j)?;
        if i == j || covered[i] || covered[j] {
            return Err(StateError::InvalidRange("bell pairs must cover disjoint sites"));
        }
        covered[i] = true;
        covered[j] = true;
    }
    if covered.iter().skip(1).any(|c| !c) {
        return Err(StateError::InvalidRange("bell pairs must cover every site"));
    }
    let dim = shape.total_dim();
    let amp_scale = libm::pow(FRAC_1_SQRT_2, pairs.len() as f64);
    let mut amps = vec![Complex64::ZERO; dim];
    'outer: for x in 0..dim {
        for &(i, j) in pairs {
            if shape.digit(x, i) != shape.digit(x, j) {
                continue 'outer;
            }
        }
        amps[x] = Complex64::new(amp_scale, 0.0);
    }
    Ok(PureState::new(shape, amps)?)
}

/// Weights of the four-qubit mixture: `p1` on the Bell-pair product
/// `P⁺₁₂ ⊗ P⁺₃₄`, `p2` on the GHZ projector, remainder on white noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BboParams {
    pub p1: f64,
    pub p2: f64,
}

impl BboParams {
    pub fn new(p1: f64, p2: f64) -> Result<Self, StateError> {
        // The 1e-12 slack absorbs grid round-off at the p1 + p2 = 1 edge.
        if !(p1 >= 0.0 && p2 >= 0.0 && p1 + p2 <= 1.0 + 1e-12) {
            return Err(StateError::InvalidWeights { p1, p2 });
        }
        Ok(Self { p1, p2 })
    }

    pub fn noise(&self) -> f64 {
        (1.0 - self.p1 - self.p2).max(0.0)
    }
}

/// Noise-degree / state-ratio coordinates: `q = 1 - p1 - p2` and
/// `r = p2 / p1`, with `r = None` standing for the infinite ratio at
/// `p1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseCoords {
    pub q: f64,
    pub r: Option<f64>,
}

impl NoiseCoords {
    pub fn from_params(p: &BboParams) -> Self {
        let q = p.noise();
        let r = if p.p1 == 0.0 { None } else { Some(p.p2 / p.p1) };
        NoiseCoords { q, r }
    }

    pub fn to_params(&self) -> Result<BboParams, StateError> {
        if !(0.0..=1.0).contains(&self.q) {
            return Err(StateError::InvalidRange("noise degree must lie in [0, 1]"));
        }
        let total = 1.0 - self.q;
        match self.r {
            None => BboParams::new(0.0, total),
            Some(r) if r >= 0.0 => {
                let p1 = total / (1.0 + r);
                BboParams::new(p1, total - p1)
            }
            Some(_) => Err(StateError::InvalidRange("ratio must be nonnegative")),
        }
    }
}

/// The four-qubit family `p1 P⁺₁₂⊗P⁺₃₄ + p2 P_GHZ + (1-p1-p2)/16 · 1`.
///
/// Invariant under the site relabelings `{e, (12), (34), (12)(34)}`.
pub fn bbo_state(p: BboParams) -> Result<DensityMatrix, StateError> {
    BboParams::new(p.p1, p.p2)?;
    let shape = SystemShape::qubits(4)?;
    let dim = shape.total_dim();
    let pairs = bell_pair_chain(shape, &[(1, 2), (3, 4)])?;
    let ghz4 = ghz(4)?;
    let noise = p.noise() / dim as f64;
    let mut mat = CMat::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut v = pairs.amp(i) * pairs.amp(j).conj() * p.p1 + ghz4.amp(i) * ghz4.amp(j).conj() * p.p2;
            if i == j {
                v += noise;
            }
            mat.set(i, j, v);
        }
    }
    Ok(DensityMatrix::trusted(mat, shape))
}

/// Bell-diagonal isotropic family `w P⁺ + (1-w)/4 · 1` on two qubits.
pub fn werner(w: f64) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&w) {
        return Err(StateError::InvalidRange("werner weight must lie in [0, 1]"));
    }
    let shape = SystemShape::qubits(2)?;
    let p = bell_pair().projector().scaled(w);
    let mat = p.add(&CMat::identity(4).scaled((1.0 - w) / 4.0));
    Ok(DensityMatrix::trusted(mat, shape))
}

/// `(1 - q) ρ + q/dim · 1`.
pub fn isotropic_mix(rho: &DensityMatrix, q: f64) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(StateError::InvalidRange("noise degree must lie in [0, 1]"));
    }
    let dim = rho.dim();
    let mat = rho
        .mat()
        .scaled(1.0 - q)
        .add(&CMat::identity(dim).scaled(q / dim as f64));
    Ok(DensityMatrix::trusted(mat, *rho.shape()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{v4, SiteSet};
    use crate::tensor::validate_density;

    #[test]
    fn ghz_amplitudes() {
        let g = ghz(4).unwrap();
        assert!((g.amp(0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((g.amp(15).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(g.amplitudes().iter().filter(|a| a.norm_sqr() > 0.0).count(), 2);
        assert_eq!(ghz(2).unwrap().amplitudes(), bell_pair().amplitudes());
        assert!(ghz(1).is_err());
    }

    #[test]
    fn w_state_marginal_purity() {
        let w = w_state(4).unwrap();
        let p = crate::tensor::marginal_purity(&w, &SiteSet::singleton(1)).unwrap();
        // diag(3/4, 1/4) squared-traces to 5/8.
        assert!((p - 0.625).abs() < 1e-12);
    }

    #[test]
    fn bell_projector_is_pure() {
        let shape = SystemShape::qubits(4).unwrap();
        let p = bell_pair_projector(&shape, 1, 2).unwrap();
        assert!((p.mat().trace().re - 1.0).abs() < 1e-12);
        assert!((p.purity() - 1.0).abs() < 1e-12);
        let marginal = p.partial_trace(&SiteSet::singleton(1)).unwrap();
        assert!(marginal.mat().max_abs_diff(&CMat::identity(2).scaled(0.5)) < 1e-12);
        assert!(bell_pair_projector(&shape, 2, 2).is_err());
        assert!(bell_pair_projector(&shape, 0, 5).is_err());
    }

    #[test]
    fn bbo_corners() {
        let noise = bbo_state(BboParams::new(0.0, 0.0).unwrap()).unwrap();
        assert!(noise.mat().max_abs_diff(&CMat::identity(16).scaled(1.0 / 16.0)) < 1e-15);

        let pairs = bbo_state(BboParams::new(1.0, 0.0).unwrap()).unwrap();
        assert!((pairs.purity() - 1.0).abs() < 1e-12);

        let ghz_corner = bbo_state(BboParams::new(0.0, 1.0).unwrap()).unwrap();
        let proj = DensityMatrix::from_pure(&ghz(4).unwrap());
        assert!(ghz_corner.mat().max_abs_diff(proj.mat()) < 1e-15);

        assert!(BboParams::new(0.6, 0.5).is_err());
        assert!(BboParams::new(-0.1, 0.5).is_err());
    }

    #[test]
    fn bbo_is_v4_invariant_on_a_grid() {
        let group = v4();
        for i in 0..5 {
            for j in 0..(5 - i) {
                let p = BboParams::new(i as f64 / 4.0, j as f64 / 4.0).unwrap();
                let rho = bbo_state(p).unwrap();
                for g in &group {
                    assert!(rho.permute_sites(g).mat().max_abs_diff(rho.mat()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn constructors_pass_validation() {
        let shape = SystemShape::qubits(4).unwrap();
        for rho in [
            bbo_state(BboParams::new(0.3, 0.4).unwrap()).unwrap(),
            isotropic_mix(&DensityMatrix::from_pure(&w_state(4).unwrap()), 0.35).unwrap(),
        ] {
            assert!(validate_density(rho.mat().clone(), shape).is_ok());
        }
        let w = werner(0.5).unwrap();
        assert!(validate_density(w.mat().clone(), SystemShape::qubits(2).unwrap()).is_ok());
    }

    #[test]
    fn coords_round_trip() {
        let p = BboParams::new(0.25, 0.25).unwrap();
        let c = NoiseCoords::from_params(&p);
        assert_eq!(c.q, 0.5);
        assert_eq!(c.r, Some(1.0));
        let back = c.to_params().unwrap();
        assert_eq!(back.p1, 0.25);
        assert_eq!(back.p2, 0.25);

        let c = NoiseCoords::from_params(&BboParams::new(0.5, 0.0).unwrap());
        assert_eq!((c.q, c.r), (0.5, Some(0.0)));

        let inf = NoiseCoords { q: 0.0, r: None };
        let p = inf.to_params().unwrap();
        assert_eq!((p.p1, p.p2), (0.0, 1.0));

        let even = NoiseCoords { q: 0.0, r: Some(1.0) };
        let p = even.to_params().unwrap();
        assert_eq!((p.p1, p.p2), (0.5, 0.5));
    }

    #[test]
    fn isotropic_mix_endpoints() {
        let rho = DensityMatrix::from_pure(&ghz(3).unwrap());
        let same = isotropic_mix(&rho, 0.0).unwrap();
        assert!(same.mat().max_abs_diff(rho.mat()) < 1e-15);
        let flat = isotropic_mix(&rho, 1.0).unwrap();
        assert!(flat.mat().max_abs_diff(&CMat::identity(8).scaled(0.125)) < 1e-15);
        assert!((werner(1.0).unwrap().purity() - 1.0).abs() < 1e-12);
    }
}
