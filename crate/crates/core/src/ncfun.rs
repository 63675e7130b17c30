//! Graded black-box NC functions and their domains.
//!
//! An [`NcFunction`] maps an `n x n` tuple to an `n x n` matrix at every
//! dimension `n`. Built-in instances are free polynomials, truncated power
//! series and transfer-function realizations ([`Handle`]); arbitrary closures
//! can be wrapped with [`FnHandle`].

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::freepoly::FreePoly;
use crate::linalg::ComplexMatrix;
use crate::realization::{eval_realization, PolyMatrix, Realization};
use crate::tuple::MatrixTuple;

/// Slack added to the domain bound when testing membership, absorbing
/// roundoff in the norm computation.
pub const DOMAIN_SLACK: f64 = 1e-9;

/// Default truncation degree for series-backed handles.
pub const DEFAULT_SERIES_TRUNCATION: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind {
    /// `max_r ||x^r|| < radius`
    Polydisk { radius: f64 },
    /// `||(x^1 ... x^d)|| < radius`
    RowBall { radius: f64 },
    /// `||δ(x)|| < 1 - margin`
    DeltaBall { delta: PolyMatrix, margin: f64 },
}

/// Where an NC function may be evaluated with the checked path.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    norm_cap: Option<f64>,
}

impl Domain {
    pub fn polydisk(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Domain {
            kind: DomainKind::Polydisk { radius },
            norm_cap: None,
        })
    }

    pub fn rowball(radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Domain {
            kind: DomainKind::RowBall { radius },
            norm_cap: None,
        })
    }

    pub fn delta_ball(delta: PolyMatrix, margin: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&margin) {
            return Err(Error::InvalidArgument(alloc::format!("margin {margin} not in [0, 1)")));
        }
        Ok(Domain {
            kind: DomainKind::DeltaBall { delta, margin },
            norm_cap: None,
        })
    }

    /// Additionally require `max_r ||x^r|| <= cap`.
    pub fn with_norm_cap(mut self, cap: f64) -> Result<Self> {
        check_radius(cap)?;
        self.norm_cap = Some(cap);
        Ok(self)
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn norm_cap(&self) -> Option<f64> {
        self.norm_cap
    }

    /// The quantity compared against [`Domain::bound`].
    pub fn level(&self, x: &MatrixTuple) -> Result<f64> {
        match &self.kind {
            DomainKind::Polydisk { .. } => x.max_norm(),
            DomainKind::RowBall { .. } => x.row_norm(),
            DomainKind::DeltaBall { delta, .. } => {
                crate::linalg::operator_norm(&delta.evaluate(x)?)
            }
        }
    }

    pub fn bound(&self) -> f64 {
        match &self.kind {
            DomainKind::Polydisk { radius } | DomainKind::RowBall { radius } => *radius,
            DomainKind::DeltaBall { margin, .. } => 1.0 - margin,
        }
    }

    /// A radius `ρ` such that tuples with small components scaled to norm
    /// `ρ` are natural probes of the domain. For δ-balls this is only a
    /// starting guess.
    pub fn nominal_radius(&self) -> f64 {
        let r = self.bound();
        match self.norm_cap {
            Some(cap) => r.min(cap),
            None => r,
        }
    }

    /// Whether the domain is closed under `x -> ζx`, `|ζ| <= 1`. For δ-balls
    /// this is the sufficient test of [`PolyMatrix::is_balanced`].
    pub fn is_balanced(&self) -> bool {
        match &self.kind {
            DomainKind::Polydisk { .. } | DomainKind::RowBall { .. } => true,
            DomainKind::DeltaBall { delta, .. } => delta.is_balanced(),
        }
    }

    /// `x` lies in the domain with `level(x) <= target` (plus slack) and
    /// within the norm cap.
    pub fn admits(&self, x: &MatrixTuple, target: f64) -> Result<bool> {
        if let Some(cap) = self.norm_cap {
            if x.max_norm()? > cap + DOMAIN_SLACK {
                return Ok(false);
            }
        }
        Ok(self.level(x)? < target + DOMAIN_SLACK)
    }

    pub fn contains(&self, x: &MatrixTuple) -> Result<bool> {
        self.admits(x, self.bound())
    }

    /// `Ok(())` if `x` is in the domain, [`Error::DomainViolation`] otherwise.
    pub fn check(&self, x: &MatrixTuple) -> Result<()> {
        let level = self.level(x)?;
        let bound = self.bound();
        if level >= bound + DOMAIN_SLACK {
            return Err(Error::DomainViolation { level, bound });
        }
        if let Some(cap) = self.norm_cap {
            let norm = x.max_norm()?;
            if norm > cap + DOMAIN_SLACK {
                return Err(Error::DomainViolation { level: norm, bound: cap });
            }
        }
        Ok(())
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!("radius must be positive, got {r}")));
    }
    Ok(())
}

/// A graded function of `d`-tuples of square matrices.
pub trait NcFunction {
    fn arity(&self) -> usize;

    fn domain(&self) -> &Domain;

    /// Evaluates without checking domain membership. The derivative code uses
    /// this on block-lifted points.
    fn eval_unchecked(&self, x: &MatrixTuple) -> Result<ComplexMatrix>;

    fn eval(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        check_arity(self.arity(), x)?;
        self.domain().check(x)?;
        self.eval_unchecked(x)
    }
}

pub(crate) fn check_arity(arity: usize, x: &MatrixTuple) -> Result<()> {
    if x.arity() != arity {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: x.arity(),
        });
    }
    Ok(())
}

impl<T: NcFunction + ?Sized> NcFunction for &T {
    fn arity(&self) -> usize {
        (**self).arity()
    }

    fn domain(&self) -> &Domain {
        (**self).domain()
    }

    fn eval_unchecked(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        (**self).eval_unchecked(x)
    }

    fn eval(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        (**self).eval(x)
    }
}

/// `F(x) = sum_k p_k(x)` with `p_k` homogeneous of degree `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesFunction {
    parts: Vec<FreePoly>,
    radius: f64,
}

impl SeriesFunction {
    /// `parts[k]` must be homogeneous of degree `k` (or zero); `radius` is a
    /// radius of guaranteed convergence.
    pub fn new(parts: Vec<FreePoly>, radius: f64) -> Result<Self> {
        let arity = parts.first().ok_or(Error::EmptyInput("series parts"))?.arity();
        for (k, p) in parts.iter().enumerate() {
            if p.arity() != arity {
                return Err(Error::ArityMismatch {
                    expected: arity,
                    found: p.arity(),
                });
            }
            if !p.is_homogeneous(k) {
                return Err(Error::InvalidArgument(alloc::format!(
                    "series part {k} is not homogeneous of degree {k}"
                )));
            }
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("convergence radius must be positive".into()));
        }
        Ok(SeriesFunction { parts, radius })
    }

    /// `sum_k (x^1)^k` up to `max_degree`; converges for `||x|| < 1`.
    pub fn geometric(max_degree: usize) -> Self {
        let x = FreePoly::var(1, 0).expect("letter in range");
        let mut parts = Vec::with_capacity(max_degree + 1);
        let mut p = FreePoly::one(1);
        for _ in 0..=max_degree {
            parts.push(p.clone());
            p = &p * &x;
        }
        SeriesFunction { parts, radius: 1.0 }
    }

    pub fn arity(&self) -> usize {
        self.parts[0].arity()
    }

    pub fn parts(&self) -> &[FreePoly] {
        &self.parts
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `sum_{k <= truncation} p_k` as one polynomial.
    pub fn partial_sum(&self, truncation: usize) -> FreePoly {
        self.parts
            .iter()
            .take(truncation + 1)
            .fold(FreePoly::zero(self.arity()), |acc, p| &acc + p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HandleBody {
    Poly(FreePoly),
    Series {
        series: SeriesFunction,
        truncation: usize,
        partial_sum: FreePoly,
    },
    Realization(Realization),
}

/// A built-in NC function: polynomial, truncated series, or realization.
#[derive(Clone, Debug, PartialEq)]
pub struct Handle {
    domain: Domain,
    body: HandleBody,
}

/// Handle evaluating the free polynomial `p`.
pub fn from_poly(p: FreePoly, domain: Domain) -> Handle {
    Handle {
        domain,
        body: HandleBody::Poly(p),
    }
}

/// Handle summing the parts `0..=truncation` of `series`. The domain must sit
/// strictly inside the convergence radius.
pub fn from_series(series: SeriesFunction, truncation: usize, domain: Domain) -> Result<Handle> {
    let reach = match domain.kind() {
        DomainKind::DeltaBall { .. } => domain.norm_cap().ok_or(Error::ExceedsConvergenceRadius {
            domain: f64::INFINITY,
            radius: series.radius(),
        })?,
        _ => domain.nominal_radius(),
    };
    if reach >= series.radius() {
        return Err(Error::ExceedsConvergenceRadius {
            domain: reach,
            radius: series.radius(),
        });
    }
    let partial_sum = series.partial_sum(truncation);
    Ok(Handle {
        domain,
        body: HandleBody::Series {
            series,
            truncation,
            partial_sum,
        },
    })
}

/// Handle evaluating the transfer function of `r` on its δ-ball.
pub fn from_realization(r: Realization) -> Handle {
    let domain = Domain::delta_ball(r.delta().clone(), 0.0).expect("zero margin is valid");
    Handle {
        domain,
        body: HandleBody::Realization(r),
    }
}

impl Handle {
    pub fn body(&self) -> &HandleBody {
        &self.body
    }

    /// Same function, different domain.
    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn kind_name(&self) -> &'static str {
        match self.body {
            HandleBody::Poly(_) => "poly",
            HandleBody::Series { .. } => "series",
            HandleBody::Realization(_) => "realization",
        }
    }
}

impl NcFunction for Handle {
    fn arity(&self) -> usize {
        match &self.body {
            HandleBody::Poly(p) => p.arity(),
            HandleBody::Series { series, .. } => series.arity(),
            HandleBody::Realization(r) => r.arity(),
        }
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn eval_unchecked(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        check_arity(self.arity(), x)?;
        match &self.body {
            HandleBody::Poly(p) => p.evaluate(x),
            HandleBody::Series { partial_sum, .. } => partial_sum.evaluate(x),
            HandleBody::Realization(r) => eval_realization(r, x),
        }
    }
}

/// Wraps a closure as an NC function (the closure is trusted to be graded).
pub struct FnHandle<F> {
    arity: usize,
    domain: Domain,
    f: F,
}

impl<F> FnHandle<F>
where
    F: Fn(&MatrixTuple) -> Result<ComplexMatrix>,
{
    pub fn new(arity: usize, domain: Domain, f: F) -> Self {
        FnHandle { arity, domain, f }
    }
}

impl<F> fmt::Debug for FnHandle<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnHandle")
            .field("arity", &self.arity)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl<F> NcFunction for FnHandle<F>
where
    F: Fn(&MatrixTuple) -> Result<ComplexMatrix>,
{
    fn arity(&self) -> usize {
        self.arity
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn eval_unchecked(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        check_arity(self.arity, x)?;
        (self.f)(x)
    }
}

/// `max |entry|` of `m - λI` relative to `max(1, ||m||_F)`, with `λ` the mean
/// diagonal entry. Zero exactly when `m` is scalar.
pub fn scalarity_residual(m: &ComplexMatrix) -> f64 {
    let n = m.rows().max(1) as f64;
    let lambda = m.trace() / n;
    m.distance_to_scalar(lambda) / m.norm_fro().max(1.0)
}

/// Convenience: true if `m` is `λI` up to `tol`.
pub fn is_scalar(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && scalarity_residual(m) <= tol
}

impl Default for Domain {
    fn default() -> Self {
        Domain {
            kind: DomainKind::Polydisk { radius: 1.0 },
            norm_cap: None,
        }
    }
}
