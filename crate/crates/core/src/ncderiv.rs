//! NC derivatives from block-bidiagonal evaluation.
//!
//! Applying `F` to the block-bidiagonal point with base points `x_1..x_{k+1}`
//! on the diagonal and directions `h_1..h_k` on the superdiagonal yields a
//! block upper-triangular matrix whose `(i, j)` block is the difference
//! operator `Δ^{j-i} F(x_i, ..., x_j)[h_i, ..., h_{j-1}]`. The `(1, k+1)`
//! block is `Δ^k`; with all base points equal it is `D^k F(x)[h, ..., h] / k!`.
//!
//! Block points generally leave the domain of `F`. Directions are scaled by a
//! factor `ε` until the lifted point is admitted by the domain, and the
//! result is rescaled by `ε^{-k}`, which is exact because `Δ^k` is k-linear.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{pairwise_sum, ComplexMatrix};
use crate::ncfun::{check_arity, NcFunction};
use crate::tuple::{bidiagonal_block, MatrixTuple};
use crate::C64;

/// Relative tolerance on the block structure of a lifted evaluation.
pub const STRUCTURE_TOL: f64 = 1e-6;
/// Smallest direction scale tried before giving up.
pub const MIN_EPSILON: f64 = 1e-6;
/// Polarization needs `2^k - 1` evaluations; orders above this are refused.
pub const MAX_POLARIZATION_ORDER: usize = 6;
/// Finite differences warn below this value of `|λ|^k`.
pub const FD_CONDITION_WARN: f64 = 1e-12;

const TARGET_FRACTION: f64 = 0.9;

#[derive(Clone, Debug, PartialEq)]
pub struct JetResult {
    pub value: ComplexMatrix,
    pub derivative: ComplexMatrix,
    /// Norm of the bottom-left block of the 2x2 lift, which vanishes for NC
    /// functions.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaResult {
    /// The `(1, k+1)` block, `Δ^k F(x_1, ..., x_{k+1})[h_1, ..., h_k]`.
    pub delta: ComplexMatrix,
    /// Whole block image with every superdiagonal block rescaled to unit
    /// directions. Blocks below the diagonal are left as computed.
    pub full_upper: ComplexMatrix,
    pub block_dim: usize,
    pub epsilon: f64,
    pub structure_residual: f64,
}

impl DeltaResult {
    pub fn order(&self) -> usize {
        self.full_upper.rows() / self.block_dim - 1
    }

    /// Block `(i, j)` of [`DeltaResult::full_upper`], zero-indexed.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        let n = self.block_dim;
        self.full_upper
            .submatrix(i * n, j * n, n, n)
            .expect("block index within the image")
    }
}

/// The largest `ε = start * 2^{-j} >= MIN_EPSILON` for which the domain
/// admits `build(ε)` at a level between the base points' level and the
/// domain bound.
pub(crate) fn choose_epsilon<F, B>(
    f: &F,
    base_points: &[&MatrixTuple],
    start: f64,
    build: B,
) -> Result<(f64, MatrixTuple)>
where
    F: NcFunction + ?Sized,
    B: Fn(f64) -> Result<MatrixTuple>,
{
    let domain = f.domain();
    let mut base_level: f64 = 0.0;
    for x in base_points {
        domain.check(x)?;
        base_level = base_level.max(domain.level(x)?);
    }
    let bound = domain.bound();
    let target = (TARGET_FRACTION * bound).max(0.5 * (base_level + bound));
    let mut eps = start;
    let mut last_level = f64::INFINITY;
    while eps >= MIN_EPSILON {
        let lifted = build(eps)?;
        if domain.admits(&lifted, target)? {
            return Ok((eps, lifted));
        }
        last_level = domain.level(&lifted)?;
        eps *= 0.5;
    }
    Err(Error::DomainViolation {
        level: last_level,
        bound: target,
    })
}

fn check_points(arity: usize, xs: &[MatrixTuple], hs: &[MatrixTuple]) -> Result<usize> {
    if hs.is_empty() {
        return Err(Error::InvalidArgument("need at least one direction".into()));
    }
    if xs.len() != hs.len() + 1 {
        return Err(Error::LengthMismatch {
            points: xs.len(),
            directions: hs.len(),
        });
    }
    let n = xs[0].dim();
    for t in xs.iter().chain(hs) {
        check_arity(arity, t)?;
        if t.dim() != n {
            return Err(Error::DimensionMismatch {
                op: "delta_k",
                left: (n, n),
                right: (t.dim(), t.dim()),
            });
        }
    }
    Ok(n)
}

/// `Δ^k F(x_1, ..., x_{k+1})[h_1, ..., h_k]` with the full block image, the
/// structure checked against block upper-triangularity and `F(x_i)` on the
/// diagonal.
pub fn delta_k<F: NcFunction + ?Sized>(
    f: &F,
    xs: &[MatrixTuple],
    hs: &[MatrixTuple],
) -> Result<DeltaResult> {
    delta_k_scaled(f, xs, hs, 1.0)
}

pub(crate) fn delta_k_scaled<F: NcFunction + ?Sized>(
    f: &F,
    xs: &[MatrixTuple],
    hs: &[MatrixTuple],
    start_eps: f64,
) -> Result<DeltaResult> {
    let n = check_points(f.arity(), xs, hs)?;
    let k = hs.len();
    let bases: Vec<&MatrixTuple> = xs.iter().collect();
    let (eps, lifted) = choose_epsilon(f, &bases, start_eps, |eps| {
        let scaled: Vec<MatrixTuple> = hs.iter().map(|h| h.scale_real(eps)).collect();
        bidiagonal_block(xs, &scaled)
    })?;
    let image = f.eval_unchecked(&lifted)?;
    let size = (k + 1) * n;
    if image.shape() != (size, size) {
        return Err(Error::DimensionMismatch {
            op: "delta_k image",
            left: (size, size),
            right: image.shape(),
        });
    }

    let mut diag_values: Vec<ComplexMatrix> = Vec::with_capacity(k + 1);
    for (i, x) in xs.iter().enumerate() {
        if i > 0 && *x == xs[i - 1] {
            let prev = diag_values[i - 1].clone();
            diag_values.push(prev);
        } else {
            diag_values.push(f.eval_unchecked(x)?);
        }
    }

    let mut full_upper = image.clone();
    let mut residual: f64 = 0.0;
    for (i, expected) in diag_values.iter().enumerate() {
        for j in 0..=k {
            let blk = image.submatrix(i * n, j * n, n, n)?;
            if j > i {
                let rescaled = blk.scale_real(eps.powi(-((j - i) as i32)));
                full_upper.set_submatrix(i * n, j * n, &rescaled)?;
            } else if j == i {
                if expected.shape() != (n, n) {
                    return Err(Error::DimensionMismatch {
                        op: "delta_k diagonal",
                        left: (n, n),
                        right: expected.shape(),
                    });
                }
                residual = residual.max((&blk - expected).norm_fro());
            } else {
                residual = residual.max(blk.norm_fro());
            }
        }
    }
    let structure_residual = residual / image.norm_fro().max(1.0);
    if structure_residual > STRUCTURE_TOL {
        return Err(Error::StructureViolation {
            residual: structure_residual,
            tolerance: STRUCTURE_TOL,
        });
    }
    let delta = full_upper.submatrix(0, k * n, n, n)?;
    Ok(DeltaResult {
        delta,
        full_upper,
        block_dim: n,
        epsilon: eps,
        structure_residual,
    })
}

/// `F(x)` and `DF(x)[h]` from the 2x2 lift `[[x, εh], [0, x]]`.
pub fn jet1<F: NcFunction + ?Sized>(f: &F, x: &MatrixTuple, h: &MatrixTuple) -> Result<JetResult> {
    let r = delta_k(f, &[x.clone(), x.clone()], core::slice::from_ref(h))?;
    let residual = r.block(1, 0).norm_fro();
    Ok(JetResult {
        value: r.block(0, 0),
        derivative: r.delta,
        residual,
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `D^k F(x)[h, ..., h] = k! Δ^k F(x, ..., x)[h, ..., h]`. Order 0 is `F(x)`.
pub fn dk_diag<F: NcFunction + ?Sized>(
    f: &F,
    x: &MatrixTuple,
    h: &MatrixTuple,
    k: usize,
) -> Result<ComplexMatrix> {
    if k == 0 {
        return f.eval(x);
    }
    let r = delta_k(f, &vec![x.clone(); k + 1], &vec![h.clone(); k])?;
    Ok(r.delta.scale_real(factorial(k)))
}

/// Finite-difference counterpart of [`dk_diag`]:
/// `((-1)^k / λ^k) sum_j (-1)^j C(k, j) F(x + jλh)`.
///
/// This equals `k! Δ^k F(x, x+λh, ..., x+kλh)[h, ..., h]` exactly for every
/// `λ`, and tends to `D^k F(x)[h, ..., h]` as `λ -> 0`.
pub fn dk_fd<F: NcFunction + ?Sized>(
    f: &F,
    x: &MatrixTuple,
    h: &MatrixTuple,
    k: usize,
    lambda: f64,
) -> Result<ComplexMatrix> {
    if k == 0 {
        return f.eval(x);
    }
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::InvalidArgument("finite-difference step must be nonzero".into()));
    }
    let lk = lambda.abs().powi(k as i32);
    if lk < FD_CONDITION_WARN {
        log::warn!("finite difference with |λ|^k = {lk:e} is badly conditioned");
    }
    let mut terms = Vec::with_capacity(k + 1);
    let mut binom = 1.0;
    for j in 0..=k {
        let point = x.try_add(&h.scale_real(j as f64 * lambda))?;
        let sign = if (k + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        terms.push(f.eval(&point)?.scale_real(sign * binom));
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    let sum = pairwise_sum(terms)?.expect("k + 1 >= 2 terms");
    Ok(sum.scale_real(lambda.powi(-(k as i32))))
}

/// The symmetric k-linear derivative `D^k F(x)[h_1, ..., h_k]`, recovered
/// from diagonal data by polarization:
/// `(1/k!) sum_{∅≠S⊆[k]} (-1)^{k-|S|} D^k F(x)[h_S, ..., h_S]`, `h_S = sum_{i∈S} h_i`.
pub fn dk_multilinear<F: NcFunction + ?Sized>(
    f: &F,
    x: &MatrixTuple,
    hs: &[MatrixTuple],
) -> Result<ComplexMatrix> {
    let k = hs.len();
    if k == 0 {
        return f.eval(x);
    }
    if k > MAX_POLARIZATION_ORDER {
        return Err(Error::InvalidArgument(alloc::format!(
            "polarization order {k} exceeds {MAX_POLARIZATION_ORDER}"
        )));
    }
    let points = vec![x.clone(); k + 1];
    let mut terms = Vec::with_capacity((1 << k) - 1);
    for mask in 1usize..(1 << k) {
        let mut h_s = MatrixTuple::zeros(x.arity(), x.dim());
        for (i, h) in hs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                h_s = h_s.try_add(h)?;
            }
        }
        let sign = if (k - mask.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        // (1/k!) * k! Δ^k = Δ^k
        let delta = delta_k(f, &points, &vec![h_s; k])?.delta;
        terms.push(delta.scale_real(sign));
    }
    Ok(pairwise_sum(terms)?.expect("at least one subset"))
}

/// `D^k F(x)[h_1, ..., h_k]` by iterated first derivatives: each direction is
/// differentiated through its own 2x2 lift, innermost `h_1`, with the earlier
/// directions amplified to the lifted dimension. The construction is ordered,
/// so comparing permutations of `hs` tests the symmetry of `D^k F`.
pub fn dk_iterated<F: NcFunction + ?Sized>(
    f: &F,
    x: &MatrixTuple,
    hs: &[MatrixTuple],
) -> Result<ComplexMatrix> {
    let k = hs.len();
    if k == 0 {
        return f.eval(x);
    }
    check_arity(f.arity(), x)?;
    let n = x.dim();
    for h in hs {
        check_arity(f.arity(), h)?;
        if h.dim() != n {
            return Err(Error::DimensionMismatch {
                op: "dk_iterated",
                left: (n, n),
                right: (h.dim(), h.dim()),
            });
        }
    }
    let (eps, lifted) = choose_epsilon(f, &[x], 1.0, |eps| {
        let mut point = x.clone();
        for h in hs.iter().rev() {
            let copies = point.dim() / n;
            let dir = h.amplify(copies).scale_real(eps);
            point = bidiagonal_block(&[point.clone(), point], &[dir])?;
        }
        Ok(point)
    })?;
    let mut m = f.eval_unchecked(&lifted)?;
    let full = n << k;
    if m.shape() != (full, full) {
        return Err(Error::DimensionMismatch {
            op: "dk_iterated image",
            left: (full, full),
            right: m.shape(),
        });
    }
    for level in (0..k).rev() {
        let size = n << level;
        m = m.submatrix(0, size, size, size)?;
    }
    Ok(m.scale(C64::new(eps.powi(-(k as i32)), 0.0)))
}
