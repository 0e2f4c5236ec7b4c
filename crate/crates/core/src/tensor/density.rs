//! Density matrices: validation, partial traces, purity, site relabeling.

use super::eig::herm_eig;
use super::matrix::{CMat, PureState};
use super::shape::SystemShape;
use super::TensorError;
use crate::partitions::SiteSet;
use crate::{Complex64, TOL_HERM, TOL_PSD_PER_DIM, TOL_TRACE};
use alloc::vec::Vec;

/// A Hermitian, positive semidefinite, trace-one operator on an n-qudit
/// register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    shape: SystemShape,
    mat: CMat,
}

impl DensityMatrix {
    /// Full validation: dimension, Hermiticity (symmetrized when the
    /// deviation is below tolerance), positive semidefiniteness via the
    /// spectrum, and unit trace.
    pub fn validated(mat: CMat, shape: SystemShape) -> Result<Self, TensorError> {
        if mat.dim() != shape.total_dim() {
            return Err(TensorError::DimensionMismatch {
                expected: shape.total_dim(),
                got: mat.dim(),
            });
        }
        if !mat.is_finite() {
            return Err(TensorError::NotFinite);
        }
        let dev = mat.herm_deviation();
        if dev >= TOL_HERM {
            return Err(TensorError::NotHermitian { deviation: dev });
        }
        let mut mat = mat;
        mat.symmetrize();
        let (vals, _) = herm_eig(&mat)?;
        let tol_psd = TOL_PSD_PER_DIM * mat.dim() as f64;
        if let Some(&min) = vals.last() {
            if min < -tol_psd {
                return Err(TensorError::NotPsd { min_eigenvalue: min });
            }
        }
        let trace = mat.trace().re;
        if libm::fabs(trace - 1.0) >= TOL_TRACE {
            return Err(TensorError::TraceNotOne { trace });
        }
        Ok(Self { shape, mat })
    }

    /// Projector onto a pure state.
    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            shape: *psi.shape(),
            mat: psi.projector(),
        }
    }

    /// Constructor for matrices that are Hermitian PSD trace-one by
    /// construction (convex mixtures of projectors, partial traces).
    /// Skips the spectral check; debug builds still assert the cheap
    /// invariants.
    pub(crate) fn trusted(mat: CMat, shape: SystemShape) -> Self {
        debug_assert!(mat.herm_deviation() < TOL_HERM);
        debug_assert!(libm::fabs(mat.trace().re - 1.0) < TOL_TRACE);
        Self { shape, mat }
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `Tr ρ²`, computed as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.mat.entries().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reduced state on `keep`, tracing out the complement.
    pub fn partial_trace(&self, keep: &SiteSet) -> Result<DensityMatrix, TensorError> {
        partial_trace(self, keep)
    }

    /// Conjugation by the site-relabeling unitary: digit of site `i` moves
    /// to site `perm(i)`.
    pub fn permute_sites(&self, perm: &crate::partitions::SitePermutation) -> Self {
        let map = site_permutation_index_map(&self.shape, perm);
        let dim = self.dim();
        let mut out = CMat::zeros(dim);
        for x in 0..dim {
            for y in 0..dim {
                out.set(map[x], map[y], self.mat.at(x, y));
            }
        }
        Self {
            shape: self.shape,
            mat: out,
        }
    }
}

/// Validates a raw matrix as a density operator. See
/// [`DensityMatrix::validated`].
pub fn validate_density(mat: CMat, shape: SystemShape) -> Result<DensityMatrix, TensorError> {
    DensityMatrix::validated(mat, shape)
}

fn check_keep(shape: &SystemShape, keep: &SiteSet) -> Result<(), TensorError> {
    if keep.is_empty() {
        return Err(TensorError::EmptySubset);
    }
    if let Some(max) = keep.max_site() {
        if max > shape.n() {
            return Err(TensorError::SiteOutOfRange {
                site: max,
                n: shape.n(),
            });
        }
    }
    Ok(())
}

/// Flat-index offsets of every digit pattern over `sites`.
fn subspace_offsets(shape: &SystemShape, sites: &[usize]) -> Vec<usize> {
    let d = shape.d();
    let mut offsets = alloc::vec![0usize];
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

/// Reduced density matrix on `keep` by direct index contraction.
pub fn partial_trace(rho: &DensityMatrix, keep: &SiteSet) -> Result<DensityMatrix, TensorError> {
    let shape = rho.shape();
    check_keep(shape, keep)?;
    let traced = keep.complement(shape.n());
    let keep_off = subspace_offsets(shape, keep.members());
    let traced_off = subspace_offsets(shape, traced.members());
    let sub_shape = SystemShape::new(keep.len(), shape.d())?;
    let mut out = CMat::zeros(keep_off.len());
    for (a, &xa) in keep_off.iter().enumerate() {
        for (b, &xb) in keep_off.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for &t in &traced_off {
                acc += rho.mat().at(xa + t, xb + t);
            }
            out.set(a, b, acc);
        }
    }
    Ok(DensityMatrix::trusted(out, sub_shape))
}

/// `Tr ρ²` of a validated density matrix.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Reduced density matrix of a pure state on `keep`, without forming the
/// full projector.
pub fn reduced_density_pure(psi: &PureState, keep: &SiteSet) -> Result<DensityMatrix, TensorError> {
    let shape = psi.shape();
    check_keep(shape, keep)?;
    let traced = keep.complement(shape.n());
    let keep_off = subspace_offsets(shape, keep.members());
    let traced_off = subspace_offsets(shape, traced.members());
    let sub_shape = SystemShape::new(keep.len(), shape.d())?;
    let mut out = CMat::zeros(keep_off.len());
    for (a, &xa) in keep_off.iter().enumerate() {
        for (b, &xb) in keep_off.iter().enumerate() {
            let mut acc = Complex64::ZERO;
            for &t in &traced_off {
                acc += psi.amp(xa + t) * psi.amp(xb + t).conj();
            }
            out.set(a, b, acc);
        }
    }
    Ok(DensityMatrix::trusted(out, sub_shape))
}

/// Linear-entropy purity `Tr ρ_γ²` of a pure state's marginal.
pub fn marginal_purity(psi: &PureState, keep: &SiteSet) -> Result<f64, TensorError> {
    Ok(reduced_density_pure(psi, keep)?.purity())
}

fn site_permutation_index_map(shape: &SystemShape, perm: &crate::partitions::SitePermutation) -> Vec<usize> {
    let dim = shape.total_dim();
    let mut map = alloc::vec![0usize; dim];
    for (x, slot) in map.iter_mut().enumerate() {
        let mut target = 0usize;
        for site in 1..=shape.n() {
            let dig = shape.digit(x, site);
            target += dig * shape.place(perm.image(site));
        }
        *slot = target;
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_pair, ghz};
    use alloc::vec;
    use alloc::vec::Vec;

    fn sites(v: &[usize]) -> SiteSet {
        SiteSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn maximally_mixed_two_qubits_validates() {
        let shape = SystemShape::qubits(2).unwrap();
        let rho = validate_density(CMat::identity(4).scaled(0.25), shape).unwrap();
        let (vals, _) = herm_eig(rho.mat()).unwrap();
        assert!(vals.iter().all(|v| (v - 0.25).abs() < 1e-12));
    }

    #[test]
    fn bell_projector_validates_rank_one() {
        let psi = bell_pair();
        let rho = validate_density(psi.projector(), *psi.shape()).unwrap();
        let (vals, _) = herm_eig(rho.mat()).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!(vals[1].abs() < 1e-12);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let shape = SystemShape::qubits(2).unwrap();
        let diag = [1.0, 0.0, 0.0, -0.001];
        let total: f64 = diag.iter().sum();
        let m = CMat::from_fn(4, |i, j| {
            if i == j {
                Complex64::new(diag[i] / total, 0.0)
            } else {
                Complex64::ZERO
            }
        });
        assert!(matches!(
            validate_density(m, shape),
            Err(TensorError::NotPsd { .. })
        ));
    }

    #[test]
    fn trace_and_hermiticity_are_checked() {
        let shape = SystemShape::qubits(1).unwrap();
        assert!(matches!(
            validate_density(CMat::identity(2), shape),
            Err(TensorError::TraceNotOne { .. })
        ));
        let mut skew = CMat::zeros(2);
        skew.set(0, 0, Complex64::ONE);
        skew.set(0, 1, Complex64::new(0.5, 0.0));
        assert!(matches!(
            validate_density(skew, shape),
            Err(TensorError::NotHermitian { .. })
        ));
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell_pair());
        let red = rho.partial_trace(&sites(&[1])).unwrap();
        assert!(red.mat().max_abs_diff(&CMat::identity(2).scaled(0.5)) < 1e-12);
        assert!((red.purity() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ghz4_pair_marginal_by_hand() {
        // Tracing sites {3,4} of the GHZ projector leaves
        // (|00⟩⟨00| + |11⟩⟨11|) / 2: only the diagonal corners survive the
        // contraction because cross terms need matching traced digits.
        let rho = DensityMatrix::from_pure(&ghz(4).unwrap());
        let red = rho.partial_trace(&sites(&[1, 2])).unwrap();
        let mut expect = CMat::zeros(4);
        expect.set(0, 0, Complex64::new(0.5, 0.0));
        expect.set(3, 3, Complex64::new(0.5, 0.0));
        assert!(red.mat().max_abs_diff(&expect) < 1e-12);
        assert!((red.purity() - 0.5).abs() < 1e-12);

        let single = rho.partial_trace(&sites(&[1])).unwrap();
        assert!((single.purity() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn product_state_marginal_factorizes() {
        // ρ_A ⊗ ρ_B with ρ_A a pure tilted qubit: tracing B returns ρ_A.
        let shape = SystemShape::qubits(2).unwrap();
        let a = [Complex64::new(0.8, 0.0), Complex64::new(0.0, 0.6)];
        let b = [Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)];
        let mut amps = Vec::new();
        for x in &a {
            for y in &b {
                amps.push(x * y);
            }
        }
        let psi = PureState::new(shape, amps).unwrap();
        let red = reduced_density_pure(&psi, &sites(&[1])).unwrap();
        let expect = CMat::from_fn(2, |i, j| a[i] * a[j].conj());
        assert!(red.mat().max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn partial_trace_chain_composes() {
        let rho = DensityMatrix::from_pure(&ghz(4).unwrap());
        let two_step = rho
            .partial_trace(&sites(&[1, 2, 3]))
            .unwrap()
            .partial_trace(&sites(&[1, 2]))
            .unwrap();
        let one_step = rho.partial_trace(&sites(&[1, 2])).unwrap();
        assert!(two_step.mat().max_abs_diff(one_step.mat()) < 1e-12);
    }

    #[test]
    fn empty_and_out_of_range_subsets_error() {
        let rho = DensityMatrix::from_pure(&bell_pair());
        assert!(matches!(
            rho.partial_trace(&SiteSet::new(vec![]).unwrap()),
            Err(TensorError::EmptySubset)
        ));
        assert!(matches!(
            rho.partial_trace(&sites(&[3])),
            Err(TensorError::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn permute_sites_moves_digits() {
        use crate::partitions::SitePermutation;
        // |01⟩⟨01| under the swap becomes |10⟩⟨10|.
        let shape = SystemShape::qubits(2).unwrap();
        let psi = PureState::new(
            shape,
            vec![
                Complex64::ZERO,
                Complex64::ONE,
                Complex64::ZERO,
                Complex64::ZERO,
            ],
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let swapped = rho.permute_sites(&SitePermutation::transposition(2, 1, 2).unwrap());
        assert!((swapped.mat().at(2, 2).re - 1.0).abs() < 1e-15);
    }
}
