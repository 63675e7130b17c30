//! Taylor expansion at the scalar point 0.
//!
//! At a scalar point the k-th difference operator applied to unit directions
//! `e_{j_1}, ..., e_{j_k}` is a scalar multiple of the identity, and that
//! scalar is the coefficient of the word `j_1 ... j_k` in the degree-k part of
//! the expansion. Extraction therefore runs at dimension 1.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::freepoly::{FreePoly, Word};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::ncderiv::delta_k_scaled;
use crate::ncfun::{check_arity, scalarity_residual, NcFunction};
use crate::tuple::MatrixTuple;
use crate::C64;

pub const DEFAULT_WORD_CAP: usize = 5000;
pub const DEFAULT_SCALAR_TOL: f64 = 1e-8;
pub const CIRCLE_SAMPLES: usize = 64;
pub const CIRCLE_INFLATION: f64 = 1.1;

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractOptions {
    /// Base dimension of the extraction.
    pub dim: usize,
    /// Optional second dimension; the coefficient is recomputed there and
    /// the discrepancy folds into the residual.
    pub cross_check_dim: Option<usize>,
    pub scalar_tol: f64,
    pub word_cap: usize,
    /// Directions start at this fraction of the domain's nominal radius.
    pub eps_factor: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            dim: 1,
            cross_check_dim: None,
            scalar_tol: DEFAULT_SCALAR_TOL,
            word_cap: DEFAULT_WORD_CAP,
            eps_factor: 0.45,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordDiagnostic {
    pub word: Word,
    pub coefficient: C64,
    pub scalarity_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorExpansion {
    /// `parts[k]` is homogeneous of degree `k`.
    pub parts: Vec<FreePoly>,
    /// One entry per extracted word of length at least 1, canonical order.
    pub diagnostics: Vec<WordDiagnostic>,
    /// Whether the domain is known to be balanced. The expansion is only
    /// guaranteed to represent `F` on balanced domains.
    pub balanced: bool,
}

impl TaylorExpansion {
    pub fn max_degree(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn max_residual(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.scalarity_residual)
            .fold(0.0, f64::max)
    }

    /// `sum_k parts[k]` as a single polynomial.
    pub fn polynomial(&self) -> FreePoly {
        let arity = self.parts[0].arity();
        self.parts.iter().fold(FreePoly::zero(arity), |acc, p| &acc + p)
    }

    pub fn evaluate(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        self.polynomial().evaluate(x)
    }
}

fn start_epsilon<F: NcFunction + ?Sized>(f: &F, opts: &ExtractOptions) -> f64 {
    opts.eps_factor * f.domain().nominal_radius()
}

fn coefficient_at<F: NcFunction + ?Sized>(
    f: &F,
    w: &Word,
    dim: usize,
    start: f64,
) -> Result<(C64, f64)> {
    let d = f.arity();
    let k = w.len();
    let zeros = vec![MatrixTuple::zeros(d, dim); k + 1];
    let dirs: Vec<MatrixTuple> = w
        .letters()
        .iter()
        .map(|&j| MatrixTuple::unit(d, j, dim))
        .collect();
    let delta = delta_k_scaled(f, &zeros, &dirs, start)?.delta;
    let c = delta.trace() / dim as f64;
    Ok((c, scalarity_residual(&delta)))
}

/// The coefficient of `w` in the Taylor expansion of `f` at 0.
pub fn word_coefficient<F: NcFunction + ?Sized>(f: &F, w: &Word) -> Result<C64> {
    word_coefficient_with(f, w, &ExtractOptions::default()).map(|d| d.coefficient)
}

pub fn word_coefficient_with<F: NcFunction + ?Sized>(
    f: &F,
    w: &Word,
    opts: &ExtractOptions,
) -> Result<WordDiagnostic> {
    let d = f.arity();
    if w.is_empty() {
        return Err(Error::InvalidArgument("the empty word is read off F(0)".into()));
    }
    if let Some(&j) = w.letters().iter().find(|&&j| j >= d) {
        return Err(Error::LetterOutOfRange { letter: j, arity: d });
    }
    if opts.dim == 0 {
        return Err(Error::InvalidArgument("extraction dimension must be positive".into()));
    }
    let start = start_epsilon(f, opts);
    let (c, mut residual) = coefficient_at(f, w, opts.dim, start)?;
    if let Some(m) = opts.cross_check_dim {
        if m == 0 {
            return Err(Error::InvalidArgument("cross-check dimension must be positive".into()));
        }
        let (c2, r2) = coefficient_at(f, w, m, start)?;
        residual = residual.max(r2).max((c - c2).norm() / c.norm().max(1.0));
    }
    if !(residual <= opts.scalar_tol) {
        return Err(Error::NonScalarResult {
            word: w.letters().to_vec(),
            residual,
        });
    }
    Ok(WordDiagnostic {
        word: w.clone(),
        coefficient: c,
        scalarity_residual: residual,
    })
}

/// Coefficients of the given words, in the given order.
pub fn extract_words<F: NcFunction + ?Sized>(
    f: &F,
    words: &[Word],
    opts: &ExtractOptions,
) -> Result<Vec<WordDiagnostic>> {
    if words.len() > opts.word_cap {
        return Err(Error::WordCapExceeded {
            words: words.len(),
            cap: opts.word_cap,
        });
    }
    words
        .iter()
        .map(|w| {
            word_coefficient_with(f, w, opts).map_err(|e| match e {
                Error::DomainViolation { .. } | Error::NonScalarResult { .. } => e,
                other => Error::Extraction {
                    word: w.letters().to_vec(),
                    source: alloc::boxed::Box::new(other),
                },
            })
        })
        .collect()
}

/// Parts `0..=max_degree` of the Taylor expansion of `f` at 0.
pub fn taylor_expand<F: NcFunction + ?Sized>(f: &F, max_degree: usize) -> Result<TaylorExpansion> {
    taylor_expand_with(f, max_degree, &ExtractOptions::default())
}

pub fn taylor_expand_with<F: NcFunction + ?Sized>(
    f: &F,
    max_degree: usize,
    opts: &ExtractOptions,
) -> Result<TaylorExpansion> {
    let d = f.arity();
    let words = Word::count_up_to(d, max_degree);
    if words > opts.word_cap {
        return Err(Error::WordCapExceeded {
            words,
            cap: opts.word_cap,
        });
    }
    let zero = MatrixTuple::zeros(d, 1);
    let f0 = f.eval(&zero)?;
    let mut parts = vec![FreePoly::constant(d, f0[(0, 0)])];
    let mut diagnostics = Vec::with_capacity(words);
    for k in 1..=max_degree {
        let layer = extract_words(f, &Word::all_of_length(d, k), opts)?;
        let part = FreePoly::from_terms(d, layer.iter().map(|w| (w.word.clone(), w.coefficient)))?;
        parts.push(part);
        diagnostics.extend(layer);
    }
    Ok(TaylorExpansion {
        parts,
        diagnostics,
        balanced: f.domain().is_balanced(),
    })
}

/// Upper bound `M ρ^{K+1} / (1 - ρ)`, `ρ = 2 / (1 + r)`, on the norm of the
/// tail `sum_{k > K} p_k(x)`, valid when `ζx` lies in the domain for
/// `|ζ| < r` and `||F(ζx)|| <= M` on `|ζ| = (1 + r) / 2`.
pub fn tail_bound(m: f64, r: f64, max_degree: usize) -> Result<f64> {
    if !(r > 1.0) {
        return Err(Error::InvalidArgument(alloc::format!("tail bound needs r > 1, got {r}")));
    }
    if !(m >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!("tail bound needs M >= 0, got {m}")));
    }
    let rho = 2.0 / (1.0 + r);
    Ok(m * rho.powi(max_degree as i32 + 1) / (1.0 - rho))
}

/// Sampled estimate of `sup ||F(ζx)||` over `|ζ| = (1 + r) / 2`, inflated by
/// [`CIRCLE_INFLATION`]. An estimate, not a certificate.
pub fn estimate_circle_sup<F: NcFunction + ?Sized>(
    f: &F,
    x: &MatrixTuple,
    r: f64,
    samples: usize,
) -> Result<f64> {
    check_arity(f.arity(), x)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one circle sample".into()));
    }
    let radius = 0.5 * (1.0 + r);
    let mut sup: f64 = 0.0;
    for i in 0..samples {
        let theta = 2.0 * core::f64::consts::PI * i as f64 / samples as f64;
        let zeta = C64::from_polar(radius, theta);
        sup = sup.max(operator_norm(&f.eval(&x.scale(zeta))?)?);
    }
    Ok(CIRCLE_INFLATION * sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncfun::{from_poly, from_realization, Domain, FnHandle};
    use crate::realization::Realization;
    use crate::sample::SampleRng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn coefficient_of_product() {
        let p = (&FreePoly::var(2, 0).unwrap() * &FreePoly::var(2, 1).unwrap()).scale(c(2.0, 0.0));
        let f = from_poly(p, Domain::polydisk(1.0).unwrap());
        let got = word_coefficient(&f, &Word::new(vec![0, 1])).unwrap();
        assert!((got - c(2.0, 0.0)).norm() < 1e-12);
        let absent = word_coefficient(&f, &Word::new(vec![1, 0])).unwrap();
        assert!(absent.norm() < 1e-10);
        assert!(word_coefficient(&f, &Word::new(vec![2])).is_err());
        assert!(word_coefficient(&f, &Word::empty()).is_err());
    }

    #[test]
    fn mobius_first_coefficient() {
        let f = from_realization(Realization::mobius(c(0.5, 0.0)).unwrap());
        let got = word_coefficient(&f, &Word::letter(0)).unwrap();
        assert!((got - c(0.75, 0.0)).norm() < 1e-10);
        let t = taylor_expand(&f, 3).unwrap();
        let expect = [-0.5, 0.75, 0.375, 0.1875];
        for (k, e) in expect.iter().enumerate() {
            let got = t.parts[k].coefficient(&Word::new(vec![0; k]));
            assert!((got - c(*e, 0.0)).norm() < 1e-10, "k = {k}: {got}");
        }
    }

    #[test]
    fn round_trip_random_polys() {
        let mut rng = SampleRng::new(11);
        for _ in 0..10 {
            let d = 1 + rng.index(3);
            let p = rng.poly(d, 4, 0.6);
            let f = from_poly(p.clone(), Domain::polydisk(1.0).unwrap());
            let t = taylor_expand(&f, 4).unwrap();
            assert!(t.polynomial().max_coeff_distance(&p) < 1e-8);
            for (k, part) in t.parts.iter().enumerate() {
                assert!(part.is_homogeneous(k));
            }
            assert!(t.max_residual() < 1e-10);
            assert!(t.balanced);
        }
    }

    #[test]
    fn cross_check_dimension() {
        let mut rng = SampleRng::new(12);
        let p = rng.poly(2, 3, 0.8);
        let f = from_poly(p.clone(), Domain::rowball(1.0).unwrap());
        let opts = ExtractOptions {
            cross_check_dim: Some(3),
            ..ExtractOptions::default()
        };
        let t = taylor_expand_with(&f, 3, &opts).unwrap();
        assert!(t.polynomial().max_coeff_distance(&p) < 1e-8);
    }

    #[test]
    fn constant_and_identity() {
        let f = from_poly(FreePoly::constant(1, c(2.0, -1.0)), Domain::polydisk(1.0).unwrap());
        let t = taylor_expand(&f, 0).unwrap();
        assert_eq!(t.parts.len(), 1);
        assert_eq!(t.parts[0].coefficient(&Word::empty()), c(2.0, -1.0));

        let id = from_realization(Realization::identity_map());
        let t = taylor_expand(&id, 3).unwrap();
        assert!(t.parts[0].coefficient(&Word::empty()).norm() < 1e-12);
        assert!((t.parts[1].coefficient(&Word::letter(0)) - c(1.0, 0.0)).norm() < 1e-12);
        assert!(t.parts[2].terms().all(|(_, v)| v.norm() < 1e-10));
        assert!(t.parts[3].terms().all(|(_, v)| v.norm() < 1e-10));
    }

    #[test]
    fn word_cap() {
        let f = from_poly(FreePoly::zero(3), Domain::polydisk(1.0).unwrap());
        let opts = ExtractOptions {
            word_cap: 10,
            ..ExtractOptions::default()
        };
        assert!(matches!(
            taylor_expand_with(&f, 3, &opts),
            Err(Error::WordCapExceeded { words: 39, cap: 10 })
        ));
    }

    #[test]
    fn non_scalar_is_reported() {
        // keeps only the first row of x^1: graded, but does not commute with
        // similarities
        let f = FnHandle::new(1, Domain::polydisk(1.0).unwrap(), |x: &MatrixTuple| {
            let m = x.component(0);
            Ok(ComplexMatrix::from_fn(m.rows(), m.cols(), |i, j| {
                if i == 0 { m[(i, j)] } else { C64::new(0.0, 0.0) }
            }))
        });
        let opts = ExtractOptions {
            dim: 2,
            ..ExtractOptions::default()
        };
        assert!(matches!(
            word_coefficient_with(&f, &Word::letter(0), &opts),
            Err(Error::NonScalarResult { .. }) | Err(Error::StructureViolation { .. })
        ));
        let t = taylor_expand_with(&f, 1, &opts);
        assert!(matches!(t, Err(Error::NonScalarResult { ref word, .. }) if word == &vec![0]));
    }

    #[test]
    fn tail_bound_values() {
        // ρ = 1/2, so the K = 0 tail is M ρ / (1 - ρ) = 1
        assert!((tail_bound(1.0, 3.0, 0).unwrap() - 1.0).abs() < 1e-15);
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let b = tail_bound(2.0, 2.5, k).unwrap();
            assert!(b < last);
            last = b;
        }
        assert!(tail_bound(1.0, 1.0, 3).is_err());
        assert!(tail_bound(-1.0, 2.0, 3).is_err());
    }

    #[test]
    fn circle_sup_of_identity() {
        let id = from_poly(FreePoly::var(1, 0).unwrap(), Domain::polydisk(1.0).unwrap());
        let x = MatrixTuple::from_scalars(&[c(0.25, 0.0)]);
        // |ζ| = 2, ||ζx|| = 0.5
        let m = estimate_circle_sup(&id, &x, 3.0, 16).unwrap();
        assert!((m - 0.55).abs() < 1e-12);
    }
}
