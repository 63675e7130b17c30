use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::C64;

/// Matrices whose smaller side is at most this size get their operator norm
/// from a dense Hermitian eigen-solve of the Gram matrix; larger ones use
/// power iteration.
pub const DENSE_NORM_LIMIT: usize = 256;

const JACOBI_MAX_SWEEPS: usize = 100;

/// Stopping rule for [`power_iteration_norm`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormPolicy {
    pub max_iter: usize,
    /// Relative change of the Rayleigh quotient between iterations.
    pub tol: f64,
}

impl Default for NormPolicy {
    fn default() -> Self {
        NormPolicy {
            max_iter: 10_000,
            tol: 1e-12,
        }
    }
}

/// Largest singular value.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    let scale = a.max_abs();
    if scale == 0.0 || a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    if !scale.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    if a.rows().min(a.cols()) > DENSE_NORM_LIMIT {
        return power_iteration_norm(a, NormPolicy::default());
    }
    let b = a.scale_real(1.0 / scale);
    let gram = if b.rows() <= b.cols() {
        &b * &b.adjoint()
    } else {
        &b.adjoint() * &b
    };
    let top = hermitian_eigenvalues(&gram)?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(scale * top.max(0.0).sqrt())
}

/// Power iteration on `a* a` from the normalized all-ones vector.
pub fn power_iteration_norm(a: &ComplexMatrix, policy: NormPolicy) -> Result<f64> {
    let n = a.cols();
    if n == 0 || a.rows() == 0 {
        return Ok(0.0);
    }
    let gram = &a.adjoint() * a;
    // The all-ones start can be annihilated (e.g. by [1 -1]); fall back to a
    // fixed ramp, then to unit vectors.
    let mut starts: Vec<Vec<C64>> = Vec::new();
    starts.push((0..n).map(|_| C64::new(1.0, 0.0)).collect());
    starts.push((0..n).map(|i| C64::new(1.0 + i as f64, 0.5 * i as f64)).collect());
    for j in 0..n {
        starts.push((0..n).map(|i| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect());
    }
    for mut v in starts {
        normalize(&mut v);
        let mut rho_prev = f64::NAN;
        for _ in 0..policy.max_iter {
            let w = gram_apply(&gram, &v);
            let rho: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let wn = vec_norm(&w);
            if wn == 0.0 {
                break;
            }
            if (rho - rho_prev).abs() <= policy.tol * rho.abs() {
                return Ok(rho.max(0.0).sqrt());
            }
            rho_prev = rho;
            v = w.into_iter().map(|z| z / wn).collect();
        }
        if rho_prev.is_finite() {
            return Err(Error::NonConvergence {
                iterations: policy.max_iter,
            });
        }
    }
    Ok(0.0)
}

fn gram_apply(g: &ComplexMatrix, v: &[C64]) -> Vec<C64> {
    (0..g.rows())
        .map(|i| g.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [C64]) {
    let n = vec_norm(v);
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// returned in diagonal order (unsorted). Only the upper triangle's Hermitian
/// part is trusted.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(h[(i, i)].re, 0.0)
        } else {
            (h[(i, j)] + h[(j, i)].conj()) * 0.5
        }
    });
    let total = a.norm_fro();
    if total == 0.0 {
        return Ok(alloc::vec![0.0; n]);
    }
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total {
            return Ok((0..n).map(|i| a[(i, i)].re).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, p, q);
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: JACOBI_MAX_SWEEPS,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`: `a <- W* a W` with
/// `W = diag(1, e^{-i phi}) [[c, s], [-s, c]]` acting on coordinates `p, q`.
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a[(p, q)];
    let g_abs = g.norm();
    if g_abs == 0.0 {
        return;
    }
    let phase = g / g_abs;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * g_abs);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let w00 = C64::new(c, 0.0);
    let w01 = C64::new(s, 0.0);
    let w10 = -phase.conj() * s;
    let w11 = phase.conj() * c;
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * w00 + akq * w10;
        a[(k, q)] = akp * w01 + akq * w11;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = w00.conj() * apk + w10.conj() * aqk;
        a[(q, k)] = w01.conj() * apk + w11.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}
