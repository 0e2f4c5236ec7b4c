//! System shapes and mixed-radix basis-label arithmetic.

use super::TensorError;
use alloc::vec::Vec;

/// Largest supported Hilbert-space dimension. Index arithmetic is exact up
/// to this bound; dense matrix work is only practical far below it.
pub const MAX_DIM: usize = 1 << 20;

/// A uniform n-qudit register: `n` constituents of local dimension `d`.
///
/// Sites are labeled `1..=n`; flat indices are 0-based with the digit of
/// site 1 most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemShape {
    n: usize,
    d: usize,
    total_dim: usize,
}

impl SystemShape {
    pub fn new(n: usize, d: usize) -> Result<Self, TensorError> {
        if n < 1 || d < 2 {
            return Err(TensorError::InvalidShape { n, d });
        }
        let mut total_dim = 1usize;
        for _ in 0..n {
            total_dim = total_dim
                .checked_mul(d)
                .filter(|&t| t <= MAX_DIM)
                .ok_or(TensorError::InvalidShape { n, d })?;
        }
        Ok(Self { n, d, total_dim })
    }

    /// Qubit register shorthand.
    pub fn qubits(n: usize) -> Result<Self, TensorError> {
        Self::new(n, 2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn check_site(&self, site: usize) -> Result<(), TensorError> {
        if site == 0 || site > self.n {
            return Err(TensorError::SiteOutOfRange { site, n: self.n });
        }
        Ok(())
    }

    /// Place value of `site`: `d^(n - site)`.
    pub fn place(&self, site: usize) -> usize {
        self.d.pow((self.n - site) as u32)
    }

    /// Digit of `index` at `site`.
    pub fn digit(&self, index: usize, site: usize) -> usize {
        index / self.place(site) % self.d
    }

    /// `index` with the digit at `site` replaced by `digit`.
    pub fn with_digit(&self, index: usize, site: usize, digit: usize) -> usize {
        let place = self.place(site);
        index - self.digit(index, site) * place + digit * place
    }

    pub fn index_to_digits(&self, index: usize) -> Vec<usize> {
        (1..=self.n).map(|site| self.digit(index, site)).collect()
    }

    pub fn digits_to_index(&self, digits: &[usize]) -> Result<usize, TensorError> {
        if digits.len() != self.n {
            return Err(TensorError::DimensionMismatch {
                expected: self.n,
                got: digits.len(),
            });
        }
        let mut index = 0usize;
        for &dig in digits {
            if dig >= self.d {
                return Err(TensorError::LevelOutOfRange { level: dig, d: self.d });
            }
            index = index * self.d + dig;
        }
        Ok(index)
    }
}

/// A computational-basis label in both digit and flat-index form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisLabel {
    pub digits: Vec<usize>,
    pub flat_index: usize,
}

impl BasisLabel {
    pub fn from_flat(shape: &SystemShape, flat_index: usize) -> Result<Self, TensorError> {
        if flat_index >= shape.total_dim() {
            return Err(TensorError::DimensionMismatch {
                expected: shape.total_dim(),
                got: flat_index,
            });
        }
        Ok(Self {
            digits: shape.index_to_digits(flat_index),
            flat_index,
        })
    }

    pub fn from_digits(shape: &SystemShape, digits: Vec<usize>) -> Result<Self, TensorError> {
        let flat_index = shape.digits_to_index(&digits)?;
        Ok(Self { digits, flat_index })
    }
}
