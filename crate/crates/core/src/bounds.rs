//! Computable mixed-state lower bounds.
//!
//! For each witness `O` with `F = O + O†`, the spectrum of `√(ρ ρ̃)` with
//! `ρ̃ = F ρ* F` yields the Wootters-style quantity
//! `max{0, 2λ₁ - Σᵢ λᵢ}`, a lower bound on the convex roof of
//! `|⟨ψ|F|ψ*⟩|`. Aggregating over a (γ, δ) family gives `Λ_{γ,δ}`, over
//! all families of a cut the η lower bound, and over partitions the
//! computable `R̃_m`.
//!
//! Since `F` has at most four entries, `ρ ρ̃` has rank at most four and
//! its nonzero spectrum equals that of the 4x4 matrix
//! `G^{1/2} (F_Q ρ*_Q F_Q) G^{1/2}` built from the principal submatrices
//! on the four touched indices `Q` (with `G = ρ_Q`). That reduced path is
//! the default; the dense path (`√ρ · F ρ* F · √ρ` at full dimension)
//! exists as an oracle and must agree to 1e-9.

use crate::flips::{enumerate_witnesses, FlipError, SparseWitness};
use crate::measures::{geometric_mean, MeasureConfig, MeasureError};
use crate::partitions::{
    is_group, nonempty_subsets, set_partitions, stirling, OrbitTable, Partition, PartitionError,
    SitePermutation, SiteSet,
};
use crate::tensor::{herm_eig, sqrt_psd, CMat, DensityMatrix, TensorError};
use crate::{Complex64, TOL_PSD_PER_DIM};
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("block count out of range: need 1 <= m <= n, got m={m}, n={n}")]
    InvalidRange { m: usize, n: usize },
    #[error("γ must be a proper nonempty subset of the sites")]
    FullSetError,
    #[error("state is not invariant under the given symmetry group (deviation {deviation:e})")]
    SymmetryViolation { deviation: f64 },
    #[error(transparent)]
    Flip(#[from] FlipError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// How per-witness terms accumulate into `Λ_{γ,δ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundVariant {
    /// `max{0, Σ_w (2λ₁ - Σλ)}` as printed in the source formula. Known to
    /// overshoot the pure-state concurrence; kept for fidelity and as a
    /// regression target, not for production.
    SumLiteral,
    /// `½ √( Σ_w max{0, 2λ₁ - Σλ}² )`. The ½ compensates the doubling
    /// `⟨F⟩ = 2⟨O⟩` of real-entried witnesses, making `Λ² ≤ C²` provable
    /// witness by witness. Production default; exact on pure states.
    #[default]
    Quadrature,
    /// `max_w max{0, 2λ₁ - Σλ}`. Diagnostic only.
    MaxSingle,
}

impl BoundVariant {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundVariant::SumLiteral => "literal",
            BoundVariant::Quadrature => "quadrature",
            BoundVariant::MaxSingle => "max",
        }
    }
}

impl core::str::FromStr for BoundVariant {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "literal" => Ok(BoundVariant::SumLiteral),
            "quadrature" => Ok(BoundVariant::Quadrature),
            "max" => Ok(BoundVariant::MaxSingle),
            _ => Err("expected one of: literal, quadrature, max"),
        }
    }
}

/// Which spectrum computation backs the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumPath {
    /// 4x4 reduced problem on the touched indices.
    #[default]
    Reduced,
    /// Full-dimension `√ρ F ρ* F √ρ` eigenproblem.
    Dense,
}

/// Eigenvalues of `√(ρ ρ̃(O))` for one witness, sorted descending and
/// clamped at zero. At most four entries are nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessSpectrum {
    pub gamma: SiteSet,
    pub delta: SiteSet,
    pub assignment: crate::flips::PairAssignment,
    pub label: usize,
    pub lambdas: Vec<f64>,
}

impl WitnessSpectrum {
    /// `2λ₁ - Σᵢ λᵢ`, unclipped.
    pub fn wootters_term(&self) -> f64 {
        match self.lambdas.first() {
            Some(&top) => 2.0 * top - self.lambdas.iter().sum::<f64>(),
            None => 0.0,
        }
    }

    pub fn clipped_term(&self) -> f64 {
        self.wootters_term().max(0.0)
    }

    pub fn lambda_sum(&self) -> f64 {
        self.lambdas.iter().sum()
    }
}

/// `ρ̃(O) = (O + O†) ρ* (O + O†)` by sparse two-sided application.
pub fn rho_tilde(rho: &DensityMatrix, witness: &SparseWitness) -> Result<CMat, BoundError> {
    let dim = rho.dim();
    if witness.dim() != dim {
        return Err(BoundError::Tensor(TensorError::DimensionMismatch {
            expected: dim,
            got: witness.dim(),
        }));
    }
    let entries = witness.f_entries();
    let mut out = CMat::zeros(dim);
    for &(i, a, s1) in &entries {
        for &(b, j, s2) in &entries {
            let v = rho.mat().at(a, b).conj() * (s1 * s2);
            out.add_at(i, j, v);
        }
    }
    Ok(out)
}

/// Square-roots an eigenvalue list into lambdas. Eigenvalues at round-off
/// level are cut to exact zero first: the square root would amplify
/// ~1e-16 noise into ~1e-8 phantom lambdas that skew the Wootters term.
/// `input_scale` is the norm scale of the matrices that produced the
/// eigenproblem, which stays meaningful even when the true spectrum is
/// entirely zero (nilpotent `ρ ρ̃`) and the output scale is pure noise.
fn spectrum_from_eigs(mut vals: Vec<f64>, tol: f64, input_scale: f64) -> Vec<f64> {
    let top = vals.first().copied().unwrap_or(0.0).max(0.0);
    let cut = 1e-14 * top.max(input_scale);
    for v in &mut vals {
        debug_assert!(*v > -tol * 10.0, "spectrum has a decisively negative eigenvalue");
        *v = if *v <= cut { 0.0 } else { libm::sqrt(*v) };
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Reduced-path spectrum: eigenvalues of the 4x4 problem on the indices
/// the witness touches.
pub fn witness_spectrum(rho: &DensityMatrix, witness: &SparseWitness) -> Result<WitnessSpectrum, BoundError> {
    let mut spectrum = WitnessSpectrum {
        gamma: witness.gamma().clone(),
        delta: witness.delta().clone(),
        assignment: witness.assignment().clone(),
        label: witness.label(),
        lambdas: Vec::new(),
    };
    if witness.is_zero() {
        return Ok(spectrum);
    }
    let mut touched: Vec<usize> = witness
        .terms()
        .iter()
        .flat_map(|t| [t.row, t.col])
        .collect();
    touched.sort_unstable();
    touched.dedup();
    let k = touched.len();
    let pos = |ix: usize| touched.binary_search(&ix).unwrap();

    let g = CMat::from_fn(k, |i, j| rho.mat().at(touched[i], touched[j]));
    let mut f_q = CMat::zeros(k);
    for (r, c, s) in witness.f_entries() {
        f_q.add_at(pos(r), pos(c), Complex64::new(s, 0.0));
    }
    let c_mat = f_q.mul(&g.conj()).mul(&f_q);
    let g_root = sqrt_psd(&g)?;
    let mut h = g_root.mul(&c_mat).mul(&g_root);
    h.symmetrize();
    let (vals, _) = herm_eig(&h)?;
    let input_scale = g.frobenius() * c_mat.frobenius();
    spectrum.lambdas = spectrum_from_eigs(vals, TOL_PSD_PER_DIM * k as f64, input_scale);
    Ok(spectrum)
}

/// Dense-path spectrum: the full-dimension Hermitian eigenproblem.
/// Oracle for the reduced path.
pub fn witness_spectrum_dense(
    rho: &DensityMatrix,
    witness: &SparseWitness,
) -> Result<WitnessSpectrum, BoundError> {
    let mut spectrum = WitnessSpectrum {
        gamma: witness.gamma().clone(),
        delta: witness.delta().clone(),
        assignment: witness.assignment().clone(),
        label: witness.label(),
        lambdas: Vec::new(),
    };
    if witness.is_zero() {
        return Ok(spectrum);
    }
    let root = sqrt_psd(rho.mat())?;
    let tilde = rho_tilde(rho, witness)?;
    let mut h = root.mul(&tilde).mul(&root);
    h.symmetrize();
    let (vals, _) = herm_eig(&h)?;
    // Tr ρ = 1 bounds the sandwich, so ρ̃ sets the input scale.
    let mut lambdas = spectrum_from_eigs(vals, TOL_PSD_PER_DIM * rho.dim() as f64, tilde.frobenius());
    lambdas.truncate(4); // rank bound from the 4-entry F
    spectrum.lambdas = lambdas;
    Ok(spectrum)
}

fn family_spectra(
    rho: &DensityMatrix,
    witnesses: &[SparseWitness],
    path: SpectrumPath,
) -> Result<Vec<WitnessSpectrum>, BoundError> {
    witnesses
        .iter()
        .map(|w| match path {
            SpectrumPath::Reduced => witness_spectrum(rho, w),
            SpectrumPath::Dense => witness_spectrum_dense(rho, w),
        })
        .collect()
}

/// Folds raw per-witness terms `2λ₁ - Σλ` into Λ.
fn aggregate_terms(terms: impl Iterator<Item = f64>, variant: BoundVariant) -> f64 {
    match variant {
        BoundVariant::SumLiteral => terms.sum::<f64>().max(0.0),
        BoundVariant::Quadrature => {
            let sq: f64 = terms
                .map(|t| {
                    let m = t.max(0.0);
                    m * m
                })
                .sum();
            0.5 * libm::sqrt(sq)
        }
        BoundVariant::MaxSingle => terms.fold(0.0, |acc, t| acc.max(t.max(0.0))),
    }
}

fn family_lambda(rho: &DensityMatrix, wits: &[SparseWitness], variant: BoundVariant) -> f64 {
    aggregate_terms(wits.iter().map(|w| small::witness_raw_term(rho, w)), variant)
}

/// `Λ_{γ,δ}(ρ)` under the chosen aggregation variant (returns Λ, not Λ²).
pub fn lambda_bound(
    rho: &DensityMatrix,
    gamma: &SiteSet,
    delta: &SiteSet,
    variant: BoundVariant,
) -> Result<f64, BoundError> {
    lambda_bound_with(rho, gamma, delta, variant, SpectrumPath::Reduced)
}

pub fn lambda_bound_with(
    rho: &DensityMatrix,
    gamma: &SiteSet,
    delta: &SiteSet,
    variant: BoundVariant,
    path: SpectrumPath,
) -> Result<f64, BoundError> {
    let wits = enumerate_witnesses(rho.shape(), gamma, delta)?;
    match path {
        SpectrumPath::Reduced => Ok(family_lambda(rho, &wits, variant)),
        SpectrumPath::Dense => {
            let spectra = family_spectra(rho, &wits, SpectrumPath::Dense)?;
            Ok(aggregate_terms(
                spectra.iter().map(WitnessSpectrum::wootters_term),
                variant,
            ))
        }
    }
}

/// Per-witness spectra of one (γ, δ) family, for trace dumps.
pub fn family_trace(
    rho: &DensityMatrix,
    gamma: &SiteSet,
    delta: &SiteSet,
    path: SpectrumPath,
) -> Result<Vec<WitnessSpectrum>, BoundError> {
    let wits = enumerate_witnesses(rho.shape(), gamma, delta)?;
    family_spectra(rho, &wits, path)
}

/// Lower bound on `η_γ(ρ)`: the scaled double sum of `Λ²` over every flip
/// family of the cut, mirroring the pure-state concurrence route.
pub fn eta_bound(
    rho: &DensityMatrix,
    gamma: &SiteSet,
    variant: BoundVariant,
    cfg: &MeasureConfig,
) -> Result<f64, BoundError> {
    let mut profile = BoundProfile::new(rho, variant, *cfg);
    profile.eta(gamma)
}

/// Per-block detail inside a partition.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockBound {
    pub gamma: SiteSet,
    pub eta_lower: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionBound {
    pub partition: Partition,
    pub per_block: Vec<BlockBound>,
    pub block_sum: f64,
    /// Orbit size this partition stands for (1 without symmetry).
    pub multiplicity: usize,
}

/// Everything `rm_bound` computed: per-partition block sums and the
/// aggregated lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub m: usize,
    pub variant: BoundVariant,
    pub per_partition: Vec<PartitionBound>,
    pub rm_tilde: f64,
    pub symmetry_used: Option<OrbitTable>,
}

/// Pre-enumerated witness families for every disjoint nonempty pair of
/// site subsets of a shape. The families depend only on the shape, so one
/// table serves every state of a sweep.
pub struct WitnessTable {
    families: BTreeMap<(u32, u32), Vec<SparseWitness>>,
}

impl WitnessTable {
    pub fn for_shape(shape: &crate::tensor::SystemShape) -> Result<Self, BoundError> {
        let all = SiteSet::full(shape.n());
        let mut families = BTreeMap::new();
        for gamma in nonempty_subsets(&all) {
            if gamma.len() >= shape.n() {
                continue;
            }
            for delta in nonempty_subsets(&gamma.complement(shape.n())) {
                let wits = enumerate_witnesses(shape, &gamma, &delta)?;
                families.insert((gamma.mask(), delta.mask()), wits);
            }
        }
        Ok(Self { families })
    }

    pub fn family(&self, gamma: &SiteSet, delta: &SiteSet) -> Option<&[SparseWitness]> {
        self.families.get(&(gamma.mask(), delta.mask())).map(Vec::as_slice)
    }
}

/// Caches `Λ²` per (s, δ) family and η per cut for one state, so that
/// several `m` values and partitions share the spectral work.
pub struct BoundProfile<'a> {
    rho: &'a DensityMatrix,
    variant: BoundVariant,
    cfg: MeasureConfig,
    table: Option<&'a WitnessTable>,
    lambda2: BTreeMap<(u32, u32), f64>,
    eta: BTreeMap<u32, f64>,
}

impl<'a> BoundProfile<'a> {
    pub fn new(rho: &'a DensityMatrix, variant: BoundVariant, cfg: MeasureConfig) -> Self {
        Self {
            rho,
            variant,
            cfg,
            table: None,
            lambda2: BTreeMap::new(),
            eta: BTreeMap::new(),
        }
    }

    /// Like [`BoundProfile::new`] but reusing pre-enumerated witnesses.
    pub fn with_table(
        rho: &'a DensityMatrix,
        variant: BoundVariant,
        cfg: MeasureConfig,
        table: &'a WitnessTable,
    ) -> Self {
        Self {
            rho,
            variant,
            cfg,
            table: Some(table),
            lambda2: BTreeMap::new(),
            eta: BTreeMap::new(),
        }
    }

    fn lambda2(&mut self, s: &SiteSet, delta: &SiteSet) -> Result<f64, BoundError> {
        let key = (s.mask(), delta.mask());
        if let Some(&v) = self.lambda2.get(&key) {
            return Ok(v);
        }
        let lam = match self.table.and_then(|t| t.family(s, delta)) {
            Some(wits) => family_lambda(self.rho, wits, self.variant),
            None => lambda_bound(self.rho, s, delta, self.variant)?,
        };
        let v = lam * lam;
        self.lambda2.insert(key, v);
        Ok(v)
    }

    /// η lower bound for the cut `gamma | complement`.
    pub fn eta(&mut self, gamma: &SiteSet) -> Result<f64, BoundError> {
        let shape = self.rho.shape();
        if gamma.is_empty() || gamma.len() >= shape.n() {
            return Err(BoundError::FullSetError);
        }
        if let Some(&v) = self.eta.get(&gamma.mask()) {
            return Ok(v);
        }
        let complement = gamma.complement(shape.n());
        let mut sum = 0.0;
        for s in nonempty_subsets(gamma) {
            for delta in nonempty_subsets(&complement) {
                sum += self.lambda2(&s, &delta)?;
            }
        }
        let v = self.cfg.eta_scale(shape.d(), gamma.len()) * sum;
        self.eta.insert(gamma.mask(), v);
        Ok(v)
    }

    /// The `R̃_m` report, optionally orbit-reduced under a symmetry group
    /// that must leave the state invariant.
    pub fn rm(&mut self, m: usize, symmetry: Option<&[SitePermutation]>) -> Result<BoundReport, BoundError> {
        let n = self.rho.shape().n();
        if m == 0 || m > n {
            return Err(BoundError::InvalidRange { m, n });
        }
        if m == 1 {
            return Ok(BoundReport {
                m,
                variant: self.variant,
                per_partition: Vec::new(),
                rm_tilde: 0.0,
                symmetry_used: None,
            });
        }
        let partitions = set_partitions(n, m)?;
        let total = partitions.len() as f64;
        debug_assert_eq!(partitions.len() as u64, stirling(n, m).unwrap());

        let (evaluated, symmetry_used) = match symmetry {
            None => {
                let evaluated: Vec<(Partition, usize)> = partitions.into_iter().map(|p| (p, 1)).collect();
                (evaluated, None)
            }
            Some(group) => {
                if !is_group(group) {
                    return Err(BoundError::Partition(PartitionError::NotAGroup));
                }
                let mut deviation = 0.0f64;
                for g in group {
                    deviation = deviation.max(self.rho.permute_sites(g).mat().max_abs_diff(self.rho.mat()));
                }
                if deviation >= 1e-10 {
                    return Err(BoundError::SymmetryViolation { deviation });
                }
                let table = crate::partitions::orbit_reduce(&partitions, group)?;
                (table.entries.clone(), Some(table))
            }
        };

        let mut per_partition = Vec::with_capacity(evaluated.len());
        for (partition, multiplicity) in evaluated {
            let mut per_block = Vec::with_capacity(partition.block_count());
            for block in partition.blocks() {
                per_block.push(BlockBound {
                    gamma: block.clone(),
                    eta_lower: self.eta(block)?,
                });
            }
            let block_sum = per_block.iter().map(|b| b.eta_lower).sum();
            per_partition.push(PartitionBound {
                partition,
                per_block,
                block_sum,
                multiplicity,
            });
        }
        let rm_tilde = geometric_mean(
            per_partition.iter().map(|p| (p.block_sum, p.multiplicity as f64)),
            total,
        ) / m as f64;
        Ok(BoundReport {
            m,
            variant: self.variant,
            per_partition,
            rm_tilde,
            symmetry_used,
        })
    }
}

/// One-shot `R̃_m(ρ)` with the calibrated normalization.
pub fn rm_bound(
    rho: &DensityMatrix,
    m: usize,
    variant: BoundVariant,
    symmetry: Option<&[SitePermutation]>,
) -> Result<BoundReport, BoundError> {
    BoundProfile::new(rho, variant, MeasureConfig::calibrated()).rm(m, symmetry)
}

/// Allocation-free reduced path: the per-witness Wootters term from fixed
/// 4x4 stack matrices. This is what sweeps hammer, so no heap traffic.
mod small {
    use super::*;

    type M4 = [[Complex64; 4]; 4];

    const ZERO4: M4 = [[Complex64::ZERO; 4]; 4];

    fn swap_sym(m: &mut M4, a: usize, b: usize) {
        m.swap(a, b);
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }

    /// Raw `2λ₁ - Σᵢλᵢ` for one witness: pivoted Cholesky `PᵀGP = LL†`
    /// of the principal submatrix `G = ρ_Q`, then the eigenvalues of the
    /// Hermitian `L† (PᵀC'P) L` with `C' = F_Q ρ*_Q F_Q`, whose nonzero
    /// spectrum equals that of `ρ ρ̃`.
    pub(super) fn witness_raw_term(rho: &DensityMatrix, witness: &SparseWitness) -> f64 {
        let terms = witness.terms();
        if terms.len() != 2 {
            return 0.0;
        }
        let mut q = [terms[0].row, terms[0].col, terms[1].row, terms[1].col];
        q.sort_unstable();
        debug_assert!(q.windows(2).all(|w| w[0] != w[1]), "witness touches 4 distinct indices");
        let pos = |ix: usize| q.iter().position(|&v| v == ix).unwrap();

        let mat = rho.mat();
        let mut g = ZERO4;
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = mat.at(q[i], q[j]);
            }
        }
        let mut f = ZERO4;
        for t in terms {
            let s = Complex64::new(t.sign as f64, 0.0);
            f[pos(t.row)][pos(t.col)] += s;
            f[pos(t.col)][pos(t.row)] += s;
        }
        // c = F conj(G) F.
        let mut tmp = ZERO4;
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Complex64::ZERO;
                for (k, fik) in f[i].iter().enumerate() {
                    acc += fik * g[k][j].conj();
                }
                tmp[i][j] = acc;
            }
        }
        let mut c = ZERO4;
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Complex64::ZERO;
                for (k, t) in tmp[i].iter().enumerate() {
                    acc += t * f[k][j];
                }
                c[i][j] = acc;
            }
        }
        let fro = |m: &M4| {
            libm::sqrt(m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>())
        };
        let input_scale = fro(&g) * fro(&c);

        // Pivoted Cholesky of G, physically permuting C along with it.
        let base = g.iter().enumerate().map(|(i, r)| r[i].re).fold(0.0, f64::max);
        let cut = 1e-14 * base;
        let mut l = ZERO4;
        let mut rank = 0;
        for k in 0..4 {
            let mut p = k;
            for i in (k + 1)..4 {
                if g[i][i].re > g[p][p].re {
                    p = i;
                }
            }
            if g[p][p].re <= cut {
                break;
            }
            if p != k {
                swap_sym(&mut g, k, p);
                swap_sym(&mut c, k, p);
                l.swap(k, p);
            }
            let d = libm::sqrt(g[k][k].re);
            l[k][k] = Complex64::new(d, 0.0);
            for i in (k + 1)..4 {
                l[i][k] = g[i][k] / d;
            }
            for i in (k + 1)..4 {
                for j in (k + 1)..=i {
                    let v = g[i][j] - l[i][k] * l[j][k].conj();
                    g[i][j] = v;
                    g[j][i] = v.conj();
                }
            }
            rank = k + 1;
        }
        if rank == 0 {
            return 0.0;
        }

        // h = L† C L on the leading rank columns.
        let mut y = ZERO4; // C L
        for i in 0..4 {
            for b in 0..rank {
                let mut acc = Complex64::ZERO;
                for (j, cij) in c[i].iter().enumerate() {
                    acc += cij * l[j][b];
                }
                y[i][b] = acc;
            }
        }
        let mut h = ZERO4;
        for a in 0..rank {
            for b in 0..rank {
                let mut acc = Complex64::ZERO;
                for i in 0..4 {
                    acc += l[i][a].conj() * y[i][b];
                }
                h[a][b] = acc;
            }
        }
        for a in 0..rank {
            for b in (a + 1)..rank {
                let avg = (h[a][b] + h[b][a].conj()) * 0.5;
                h[a][b] = avg;
                h[b][a] = avg.conj();
            }
            h[a][a] = Complex64::new(h[a][a].re, 0.0);
        }

        let vals = jacobi_values(&mut h, rank);
        let top = vals[..rank].iter().copied().fold(0.0, f64::max);
        // Same round-off cut as spectrum_from_eigs, keyed to the input
        // scale so a nilpotent product clips to an exact zero term.
        let lam_cut = 1e-14 * top.max(input_scale);
        let mut max = 0.0f64;
        let mut sum = 0.0f64;
        for &v in &vals[..rank] {
            if v > lam_cut {
                let s = libm::sqrt(v);
                sum += s;
                max = max.max(s);
            }
        }
        2.0 * max - sum
    }

    /// Eigenvalues of a Hermitian block by cyclic Jacobi without
    /// accumulating eigenvectors.
    fn jacobi_values(a: &mut M4, n: usize) -> [f64; 4] {
        for _ in 0..40 {
            let mut off = 0.0f64;
            let mut scale = 1e-300f64;
            for i in 0..n {
                scale = scale.max(libm::fabs(a[i][i].re));
                for j in (i + 1)..n {
                    let v = libm::sqrt(a[i][j].norm_sqr());
                    off = off.max(v);
                    scale = scale.max(v);
                }
            }
            if off <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for r in (p + 1)..n {
                    rotate_values(a, n, p, r);
                }
            }
        }
        let mut out = [0.0f64; 4];
        for (i, slot) in out.iter_mut().enumerate().take(n) {
            *slot = a[i][i].re;
        }
        out
    }

    fn rotate_values(a: &mut M4, n: usize, p: usize, r: usize) {
        let apr = a[p][r];
        let mag = libm::sqrt(apr.norm_sqr());
        if mag < 1e-300 {
            a[p][r] = Complex64::ZERO;
            a[r][p] = Complex64::ZERO;
            return;
        }
        let u = apr / mag;
        let tau = (a[r][r].re - a[p][p].re) / (2.0 * mag);
        let t = if tau >= 0.0 {
            1.0 / (tau + libm::sqrt(1.0 + tau * tau))
        } else {
            1.0 / (tau - libm::sqrt(1.0 + tau * tau))
        };
        let cth = 1.0 / libm::sqrt(1.0 + t * t);
        let sth = t * cth;
        let v11 = Complex64::new(cth, 0.0);
        let v12 = Complex64::new(sth, 0.0);
        let v21 = -sth * u.conj();
        let v22 = cth * u.conj();
        for k in 0..n {
            let akp = a[k][p];
            let akr = a[k][r];
            a[k][p] = akp * v11 + akr * v21;
            a[k][r] = akp * v12 + akr * v22;
        }
        for k in 0..n {
            let apk = a[p][k];
            let ark = a[r][k];
            a[p][k] = v11.conj() * apk + v21.conj() * ark;
            a[r][k] = v12.conj() * apk + v22.conj() * ark;
        }
        a[p][r] = Complex64::ZERO;
        a[r][p] = Complex64::ZERO;
        a[p][p] = Complex64::new(a[p][p].re, 0.0);
        a[r][r] = Complex64::new(a[r][r].re, 0.0);
    }
}
