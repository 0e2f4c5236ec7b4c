//! Hermitian eigendecomposition and matrix square roots.
//!
//! Cyclic Jacobi with complex plane rotations. Quadratic convergence and
//! unconditional stability make it the right tool for the 4x4 and 16x16
//! matrices this crate works with; there is no attempt at large-matrix
//! performance.

use super::matrix::{cabs, CMat};
use super::TensorError;
use crate::{Complex64, TOL_HERM, TOL_PSD_PER_DIM};
use alloc::vec::Vec;

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues sorted descending and the matching unitary of
/// eigenvectors as columns, so `mat = V diag(vals) V†`.
pub fn herm_eig(mat: &CMat) -> Result<(Vec<f64>, CMat), TensorError> {
    let n = mat.dim();
    let dev = mat.herm_deviation();
    if dev >= TOL_HERM {
        return Err(TensorError::NotHermitian { deviation: dev });
    }
    if !mat.is_finite() {
        return Err(TensorError::NotFinite);
    }
    let mut a = mat.clone();
    a.symmetrize();
    let mut q = CMat::identity(n);
    let target = 1e-14 * a.frobenius().max(1.0);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_frobenius(&a) <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                rotate(&mut a, &mut q, p, r);
            }
        }
    }
    if !converged && off_frobenius(&a) > target {
        return Err(TensorError::ConvergenceFailure);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = CMat::from_fn(n, |i, j| q.at(i, order[j]));
    Ok((vals, vecs))
}

fn off_frobenius(a: &CMat) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += 2.0 * a.at(i, j).norm_sqr();
        }
    }
    libm::sqrt(sum)
}

/// Annihilates the (p, r) entry by the unitary plane rotation
/// `V = [[c, s], [-s·conj(u), c·conj(u)]]` with `u = a_pr / |a_pr|`.
fn rotate(a: &mut CMat, q: &mut CMat, p: usize, r: usize) {
    let apr = a.at(p, r);
    let mag = cabs(apr);
    if mag < 1e-300 {
        a.set(p, r, Complex64::ZERO);
        a.set(r, p, Complex64::ZERO);
        return;
    }
    let u = apr / mag;
    let app = a.at(p, p).re;
    let arr = a.at(r, r).re;
    let tau = (arr - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + libm::sqrt(1.0 + tau * tau))
    } else {
        1.0 / (tau - libm::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / libm::sqrt(1.0 + t * t);
    let s = t * c;

    let v11 = Complex64::new(c, 0.0);
    let v12 = Complex64::new(s, 0.0);
    let v21 = -s * u.conj();
    let v22 = c * u.conj();

    let n = a.dim();
    // A <- A V (columns p, r).
    for k in 0..n {
        let akp = a.at(k, p);
        let akr = a.at(k, r);
        a.set(k, p, akp * v11 + akr * v21);
        a.set(k, r, akp * v12 + akr * v22);
    }
    // A <- V† A (rows p, r).
    for k in 0..n {
        let apk = a.at(p, k);
        let ark = a.at(r, k);
        a.set(p, k, v11.conj() * apk + v21.conj() * ark);
        a.set(r, k, v12.conj() * apk + v22.conj() * ark);
    }
    a.set(p, r, Complex64::ZERO);
    a.set(r, p, Complex64::ZERO);
    let dp = a.at(p, p);
    let dr = a.at(r, r);
    a.set(p, p, Complex64::new(dp.re, 0.0));
    a.set(r, r, Complex64::new(dr.re, 0.0));
    // Q <- Q V.
    for k in 0..n {
        let qkp = q.at(k, p);
        let qkr = q.at(k, r);
        q.set(k, p, qkp * v11 + qkr * v21);
        q.set(k, r, qkp * v12 + qkr * v22);
    }
}

/// Rebuilds `V diag(vals) V†`.
pub fn from_eig(vals: &[f64], vecs: &CMat) -> CMat {
    let n = vecs.dim();
    CMat::from_fn(n, |i, j| {
        (0..n)
            .map(|k| vecs.at(i, k) * vals[k] * vecs.at(j, k).conj())
            .sum()
    })
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-tol_psd, 0)` with `tol_psd = TOL_PSD_PER_DIM · dim`
/// are treated as round-off and clamped to zero; anything more negative is
/// an error.
pub fn sqrt_psd(mat: &CMat) -> Result<CMat, TensorError> {
    let (vals, vecs) = herm_eig(mat)?;
    let tol_psd = TOL_PSD_PER_DIM * mat.dim() as f64;
    if let Some(&worst) = vals.last() {
        if worst < -tol_psd {
            return Err(TensorError::NotPsd { min_eigenvalue: worst });
        }
    }
    // Eigenvalues at kernel level are round-off; the square root would
    // amplify them from ~1e-16 to ~1e-8, so cut them to exact zero.
    let cut = 1e-14 * vals.first().copied().unwrap_or(0.0).max(0.0);
    let roots: Vec<f64> = vals
        .iter()
        .map(|&v| if v <= cut { 0.0 } else { libm::sqrt(v) })
        .collect();
    Ok(from_eig(&roots, &vecs))
}
