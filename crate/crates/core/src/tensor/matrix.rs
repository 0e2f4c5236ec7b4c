//! Dense complex matrices and pure-state vectors.
//!
//! These are deliberately small: row-major storage, naive products, no
//! sparsity. Working dimensions in this crate are tiny (16 for four
//! qubits), so clarity wins over BLAS.

use super::shape::SystemShape;
use super::TensorError;
use crate::{Complex64, TOL_NORM};
use alloc::vec;
use alloc::vec::Vec;

pub(crate) fn cabs(z: Complex64) -> f64 {
    libm::sqrt(z.norm_sqr())
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Rebuilds from split real/imaginary rows; `re` and `im` must both
    /// have `dim * dim` entries.
    pub fn from_re_im(dim: usize, re: &[f64], im: &[f64]) -> Result<Self, TensorError> {
        if re.len() != dim * dim || im.len() != dim * dim {
            return Err(TensorError::DimensionMismatch {
                expected: dim * dim,
                got: re.len().max(im.len()),
            });
        }
        let data = re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] += v;
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn re_im(&self) -> (Vec<f64>, Vec<f64>) {
        (
            self.data.iter().map(|z| z.re).collect(),
            self.data.iter().map(|z| z.im).collect(),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.at(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = Complex64::ZERO;
            for j in 0..n {
                acc += self.data[i * n + j] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.at(j, i).conj())
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        Self {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.at(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|&z| cabs(z)).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.sub(rhs).max_abs()
    }

    /// Max-norm of `A - A†`.
    pub fn herm_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max(cabs(self.at(i, j) - self.at(j, i).conj()));
            }
        }
        dev
    }

    /// Replaces the matrix by `(A + A†) / 2`.
    pub fn symmetrize(&mut self) {
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let avg = (self.at(i, j) + self.at(j, i).conj()) * 0.5;
                self.set(i, j, avg);
                self.set(j, i, avg.conj());
            }
            let d = self.at(i, i);
            self.set(i, i, Complex64::new(d.re, 0.0));
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `Σ_i conj(a_i) b_i`.
pub fn vec_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm(a: &[Complex64]) -> f64 {
    libm::sqrt(a.iter().map(|z| z.norm_sqr()).sum())
}

/// A normalized pure state of an n-qudit register.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    shape: SystemShape,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Accepts an amplitude vector with unit norm within `TOL_NORM`.
    pub fn new(shape: SystemShape, amplitudes: Vec<Complex64>) -> Result<Self, TensorError> {
        if amplitudes.len() != shape.total_dim() {
            return Err(TensorError::DimensionMismatch {
                expected: shape.total_dim(),
                got: amplitudes.len(),
            });
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(TensorError::NotFinite);
        }
        let norm = vec_norm(&amplitudes);
        if libm::fabs(norm - 1.0) >= TOL_NORM {
            return Err(TensorError::NormNotOne { norm });
        }
        Ok(Self { shape, amplitudes })
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn normalized(shape: SystemShape, mut amplitudes: Vec<Complex64>) -> Result<Self, TensorError> {
        if amplitudes.len() != shape.total_dim() {
            return Err(TensorError::DimensionMismatch {
                expected: shape.total_dim(),
                got: amplitudes.len(),
            });
        }
        let norm = vec_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(TensorError::NotFinite);
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self { shape, amplitudes })
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn amp(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Entrywise complex conjugate in the computational basis.
    pub fn conjugated(&self) -> Self {
        Self {
            shape: self.shape,
            amplitudes: self.amplitudes.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Projector `|ψ⟩⟨ψ|` as a dense matrix.
    pub fn projector(&self) -> CMat {
        let n = self.shape.total_dim();
        CMat::from_fn(n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }
}
