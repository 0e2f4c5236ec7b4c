//! Seeded random construction of states, unitaries and ensembles.
//!
//! Everything is driven by an explicitly seeded ChaCha stream so that runs
//! are reproducible; parallel callers derive per-task seeds with
//! [`derive_seed`] instead of sharing a generator.

use crate::partitions::SiteSet;
use crate::tensor::{CMat, DensityMatrix, PureState, SystemShape, TensorError};
use crate::Complex64;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

pub type SeededRng = ChaCha12Rng;

/// Deterministic generator for a master seed.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Stateless seed derivation (splitmix64 finalizer over seed ‖ index),
/// giving independent streams per task regardless of scheduling.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard normal pair via the Box-Muller transform.
fn normal_pair(rng: &mut impl Rng) -> (f64, f64) {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    let r = libm::sqrt(-2.0 * libm::log(u1));
    let theta = 2.0 * core::f64::consts::PI * u2;
    (r * libm::cos(theta), r * libm::sin(theta))
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let (re, im) = normal_pair(rng);
    Complex64::new(re, im)
}

/// Square matrix of independent complex standard normals.
pub fn ginibre(dim: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(dim, |_, _| complex_normal(rng))
}

/// Haar-distributed unitary: Ginibre sample orthonormalized by modified
/// Gram-Schmidt (two passes), which fixes the positive-diagonal QR gauge.
pub fn haar_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(dim, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|j| (0..dim).map(|i| g.at(i, j)).collect()).collect();
    for j in 0..dim {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = crate::tensor::vec_inner(&cols[k], &cols[j]);
                for i in 0..dim {
                    let c = cols[k][i];
                    cols[j][i] -= proj * c;
                }
            }
        }
        let norm = crate::tensor::vec_norm(&cols[j]);
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    CMat::from_fn(dim, |i, j| cols[j][i])
}

/// Haar-random pure state.
pub fn random_pure(shape: SystemShape, rng: &mut impl Rng) -> PureState {
    let amps: Vec<Complex64> = (0..shape.total_dim()).map(|_| complex_normal(rng)).collect();
    PureState::normalized(shape, amps).expect("normal vector has positive norm")
}

/// Full-rank mixed state from the Hilbert-Schmidt (Ginibre) ensemble.
pub fn random_density(shape: SystemShape, rng: &mut impl Rng) -> DensityMatrix {
    let dim = shape.total_dim();
    let g = ginibre(dim, rng);
    let mut rho = g.mul(&g.adjoint());
    let tr = rho.trace().re;
    rho = rho.scaled(1.0 / tr);
    rho.symmetrize();
    DensityMatrix::validated(rho, shape).expect("Ginibre product is PSD with unit trace")
}

/// Offsets of all digit patterns over `sites` (most significant first).
pub(crate) fn subspace_offsets(shape: &SystemShape, sites: &[usize]) -> Vec<usize> {
    let d = shape.d();
    let mut offsets = vec![0usize];
    for &site in sites {
        let place = shape.place(site);
        let mut next = Vec::with_capacity(offsets.len() * d);
        for &base in &offsets {
            for dig in 0..d {
                next.push(base + dig * place);
            }
        }
        offsets = next;
    }
    offsets
}

/// Random pure state that is a product across the cut `gamma | complement`.
pub fn random_product_pure(
    shape: SystemShape,
    gamma: &SiteSet,
    rng: &mut impl Rng,
) -> Result<PureState, TensorError> {
    if gamma.is_empty() || gamma.len() >= shape.n() {
        return Err(TensorError::EmptySubset);
    }
    if gamma.max_site().unwrap() > shape.n() {
        return Err(TensorError::SiteOutOfRange {
            site: gamma.max_site().unwrap(),
            n: shape.n(),
        });
    }
    let rest = gamma.complement(shape.n());
    let off_g = subspace_offsets(&shape, gamma.members());
    let off_r = subspace_offsets(&shape, rest.members());
    let u: Vec<Complex64> = (0..off_g.len()).map(|_| complex_normal(rng)).collect();
    let v: Vec<Complex64> = (0..off_r.len()).map(|_| complex_normal(rng)).collect();
    let mut amps = vec![Complex64::ZERO; shape.total_dim()];
    for (a, &xa) in off_g.iter().enumerate() {
        for (b, &xb) in off_r.iter().enumerate() {
            amps[xa + xb] = u[a] * v[b];
        }
    }
    PureState::normalized(shape, amps)
}

/// Random convex mixture of `terms` product pure states across the same
/// cut; separable with respect to `gamma | complement` by construction.
pub fn random_separable_mixture(
    shape: SystemShape,
    gamma: &SiteSet,
    terms: usize,
    rng: &mut impl Rng,
) -> Result<DensityMatrix, TensorError> {
    let dim = shape.total_dim();
    // Dirichlet(1, ..., 1) weights.
    let mut weights: Vec<f64> = (0..terms.max(1))
        .map(|_| -libm::log(1.0 - rng.random::<f64>()))
        .collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let mut mat = CMat::zeros(dim);
    for &w in &weights {
        let psi = random_product_pure(shape, gamma, rng)?;
        for i in 0..dim {
            for j in 0..dim {
                mat.add_at(i, j, psi.amp(i) * psi.amp(j).conj() * w);
            }
        }
    }
    mat.symmetrize();
    Ok(DensityMatrix::trusted(mat, shape))
}
