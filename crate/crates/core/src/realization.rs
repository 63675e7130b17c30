//! δ-balls and transfer-function realizations
//!
//! ```text
//! F(x) = A⊗1 + (B⊗1)(1⊗δ(x)) [1 − (D⊗1)(1⊗δ(x))]^{-1} (C⊗1)
//! ```
//!
//! for a colligation `V = [[A, B], [C, D]] : ℂ ⊕ ℳ^I → ℂ ⊕ ℳ^J` and an
//! `I x J` matrix `δ` of free polynomials.
//!
//! Coordinates on `ℳ ⊗ ℂ^I ⊗ ℂ^n` are ordered `(μ, i, t)` with the auxiliary
//! index `μ` slowest and the matrix coordinate `t` fastest, which is the
//! ordering [`kron`] produces.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::freepoly::FreePoly;
use crate::linalg::{kron, operator_norm, ComplexMatrix, Lu};
use crate::sample::SampleRng;
use crate::tuple::MatrixTuple;
use crate::C64;

/// Isometry tolerance when a realization is constructed as isometric.
pub const ISOMETRY_TOL: f64 = 1e-10;
/// Isometry tolerance required before a contractivity scan.
pub const SCAN_ISOMETRY_TOL: f64 = 1e-8;
/// Margin kept from the boundary of the δ-ball when sampling.
pub const SCAN_MARGIN: f64 = 0.05;
/// `max ||F(x)||` may exceed 1 by this much and still pass.
pub const SCAN_NORM_SLACK: f64 = 1e-8;

const SCAN_STARVATION_DRAWS: usize = 100_000;
const SCAN_MIN_ACCEPTANCE: f64 = 0.01;

/// An `I x J` grid of free polynomials in a common number of variables.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    arity: usize,
    entries: Vec<FreePoly>,
}

impl PolyMatrix {
    /// `entries` in row-major order.
    pub fn new(rows: usize, cols: usize, entries: Vec<FreePoly>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput("polynomial matrix"));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                op: "PolyMatrix::new",
                left: (rows, cols),
                right: (entries.len(), 1),
            });
        }
        let arity = entries[0].arity();
        if let Some(bad) = entries.iter().find(|p| p.arity() != arity) {
            return Err(Error::ArityMismatch {
                expected: arity,
                found: bad.arity(),
            });
        }
        Ok(PolyMatrix {
            rows,
            cols,
            arity,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entry(&self, i: usize, j: usize) -> &FreePoly {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[FreePoly] {
        &self.entries
    }

    /// Sufficient condition for `B_δ` to be balanced: every nonzero entry is
    /// homogeneous of one common positive degree, so `δ(ζx) = ζ^p δ(x)`.
    pub fn is_balanced(&self) -> bool {
        let mut degree = None;
        for p in self.entries.iter().filter(|p| !p.is_zero()) {
            let k = match p.degree() {
                Some(k) if k > 0 && p.is_homogeneous(k) => k,
                _ => return false,
            };
            match degree {
                None => degree = Some(k),
                Some(prev) if prev != k => return false,
                _ => {}
            }
        }
        true
    }

    /// The `(I n) x (J n)` block matrix with `(i, j)` block `δ_ij(x)`.
    pub fn evaluate(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        if x.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: x.arity(),
            });
        }
        let n = x.dim();
        let mut out = ComplexMatrix::zeros(self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let p = self.entry(i, j);
                if !p.is_zero() {
                    out.set_submatrix(i * n, j * n, &p.evaluate(x)?)?;
                }
            }
        }
        Ok(out)
    }
}

/// `diag(x^1, ..., x^d)`: its δ-ball is the NC polydisk.
pub fn delta_polydisk(d: usize) -> PolyMatrix {
    let entries = (0..d * d)
        .map(|k| {
            let (i, j) = (k / d, k % d);
            if i == j {
                FreePoly::var(d, i).expect("letter in range")
            } else {
                FreePoly::zero(d)
            }
        })
        .collect();
    PolyMatrix::new(d, d, entries).expect("well-formed")
}

/// The row `(x^1 x^2 ... x^d)`: its δ-ball is the NC row ball.
pub fn delta_rowball(d: usize) -> PolyMatrix {
    let entries = (0..d).map(|j| FreePoly::var(d, j).expect("letter in range")).collect();
    PolyMatrix::new(1, d, entries).expect("well-formed")
}

pub fn eval_delta(delta: &PolyMatrix, x: &MatrixTuple) -> Result<ComplexMatrix> {
    delta.evaluate(x)
}

/// `||δ(x)|| < 1 - margin`.
pub fn in_ball(delta: &PolyMatrix, x: &MatrixTuple, margin: f64) -> Result<bool> {
    if !(0.0..1.0).contains(&margin) {
        return Err(Error::InvalidArgument(alloc::format!("margin {margin} not in [0, 1)")));
    }
    Ok(operator_norm(&delta.evaluate(x)?)? < 1.0 - margin)
}

/// Index `k >= 1` of the exhaustion set
/// `E_k = { x : ||δ(x)|| <= 1 - 1/k, max_r ||x^r|| <= k }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExhaustionIndex(usize);

impl ExhaustionIndex {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("exhaustion index must be >= 1".into()));
        }
        Ok(ExhaustionIndex(k))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

pub fn in_exhaustion(delta: &PolyMatrix, x: &MatrixTuple, k: ExhaustionIndex) -> Result<bool> {
    let k = k.0 as f64;
    let level = operator_norm(&delta.evaluate(x)?)?;
    Ok(level <= 1.0 - 1.0 / k && x.max_norm()? <= k)
}

/// A colligation `(A, B, C, D)` with auxiliary dimension `m`, together with δ.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    delta: PolyMatrix,
    m: usize,
    a: C64,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

impl Realization {
    /// Shapes: `b` is `1 x mI`, `c` is `mJ x 1`, `d` is `mJ x mI`.
    pub fn new(
        delta: PolyMatrix,
        m: usize,
        a: C64,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("auxiliary dimension must be positive".into()));
        }
        let mi = m * delta.rows();
        let mj = m * delta.cols();
        let expect = |name: &'static str, got: &ComplexMatrix, want: (usize, usize)| {
            if got.shape() != want {
                Err(Error::DimensionMismatch {
                    op: name,
                    left: want,
                    right: got.shape(),
                })
            } else {
                Ok(())
            }
        };
        expect("realization B", &b, (1, mi))?;
        expect("realization C", &c, (mj, 1))?;
        expect("realization D", &d, (mj, mi))?;
        Ok(Realization { delta, m, a, b, c, d })
    }

    /// Like [`Realization::new`], but rejects colligations that are not
    /// isometric within [`ISOMETRY_TOL`].
    pub fn new_isometric(
        delta: PolyMatrix,
        m: usize,
        a: C64,
        b: ComplexMatrix,
        c: ComplexMatrix,
        d: ComplexMatrix,
    ) -> Result<Self> {
        let r = Self::new(delta, m, a, b, c, d)?;
        let residual = check_isometry(&r)?;
        if residual > ISOMETRY_TOL {
            return Err(Error::PreconditionViolation {
                what: "colligation is not an isometry",
                residual,
            });
        }
        Ok(r)
    }

    /// Splits an isometric `(1 + mJ) x (1 + mI)` matrix into `(A, B, C, D)`.
    pub fn from_colligation(delta: PolyMatrix, m: usize, v: &ComplexMatrix) -> Result<Self> {
        let mi = m * delta.rows();
        let mj = m * delta.cols();
        if v.shape() != (1 + mj, 1 + mi) {
            return Err(Error::DimensionMismatch {
                op: "from_colligation",
                left: (1 + mj, 1 + mi),
                right: v.shape(),
            });
        }
        Self::new(
            delta,
            m,
            v[(0, 0)],
            v.submatrix(0, 1, 1, mi)?,
            v.submatrix(1, 0, mj, 1)?,
            v.submatrix(1, 1, mj, mi)?,
        )
    }

    /// The disk automorphism `(x - a)(1 - ā x)^{-1}` on one variable, from
    /// the unitary colligation `[[-a, s], [s, ā]]`, `s = sqrt(1 - |a|^2)`.
    pub fn mobius(a: C64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::InvalidArgument("Möbius parameter must lie in the open disk".into()));
        }
        let s = C64::new((1.0 - a.norm_sqr()).sqrt(), 0.0);
        let one = |z: C64| ComplexMatrix::scalar(1, z);
        Self::new(delta_polydisk(1), 1, -a, one(s), one(s), one(a.conj()))
    }

    /// `x ↦ x^1` on one variable: `A = 0, B = C = 1, D = 0`.
    pub fn identity_map() -> Self {
        let one = ComplexMatrix::identity(1);
        Self::new(delta_polydisk(1), 1, C64::zero(), one.clone(), one, ComplexMatrix::zeros(1, 1))
            .expect("shapes are consistent")
    }

    pub fn delta(&self) -> &PolyMatrix {
        &self.delta
    }

    pub fn aux_dim(&self) -> usize {
        self.m
    }

    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn c(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    pub fn arity(&self) -> usize {
        self.delta.arity()
    }

    /// `V = [[A, B], [C, D]]`, of shape `(1 + mJ) x (1 + mI)`.
    pub fn colligation(&self) -> ComplexMatrix {
        let mi = self.b.cols();
        let mj = self.c.rows();
        let mut v = ComplexMatrix::zeros(1 + mj, 1 + mi);
        v[(0, 0)] = self.a;
        v.set_submatrix(0, 1, &self.b).expect("fits");
        v.set_submatrix(1, 0, &self.c).expect("fits");
        v.set_submatrix(1, 1, &self.d).expect("fits");
        v
    }

    /// Replaces `D` by `factor * D`; used to build non-isometric controls.
    pub fn with_scaled_d(&self, factor: f64) -> Self {
        let mut r = self.clone();
        r.d = r.d.scale_real(factor);
        r
    }
}

/// `||V* V - I||`.
pub fn check_isometry(r: &Realization) -> Result<f64> {
    let v = r.colligation();
    let gram = &v.adjoint() * &v;
    operator_norm(&(&gram - &ComplexMatrix::identity(v.cols())))
}

/// The pieces of the transfer-function formula at one point, amplified to the
/// matrix dimension of `x`.
struct Amplified {
    delta_x: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
    d: ComplexMatrix,
}

fn amplify(r: &Realization, x: &MatrixTuple) -> Result<Amplified> {
    let n = x.dim();
    let id_n = ComplexMatrix::identity(n);
    let delta_x = kron(&ComplexMatrix::identity(r.m), &r.delta.evaluate(x)?);
    Ok(Amplified {
        delta_x,
        b: kron(&r.b, &id_n),
        c: kron(&r.c, &id_n),
        d: kron(&r.d, &id_n),
    })
}

/// Evaluates the transfer function at `x`.
pub fn eval_realization(r: &Realization, x: &MatrixTuple) -> Result<ComplexMatrix> {
    let n = x.dim();
    let amp = amplify(r, x)?;
    // resolvent lives on ℳ^J ⊗ ℂ^n
    let resolvent_arg = &ComplexMatrix::identity(amp.d.rows()) - &(&amp.d * &amp.delta_x);
    let lu = Lu::new(&resolvent_arg).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::ResolventSingular,
        other => other,
    })?;
    let y = lu.solve(&amp.c)?;
    let mut out = &(&amp.b * &amp.delta_x) * &y;
    for i in 0..n {
        out[(i, i)] += r.a;
    }
    Ok(out)
}

/// `||[1 − (D⊗1)(1⊗δ(x))]^{-1}||`.
pub fn resolvent_norm(r: &Realization, x: &MatrixTuple) -> Result<f64> {
    let amp = amplify(r, x)?;
    let arg = &ComplexMatrix::identity(amp.d.rows()) - &(&amp.d * &amp.delta_x);
    let inv = crate::linalg::inverse(&arg).map_err(|_| Error::ResolventSingular)?;
    operator_norm(&inv)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub dim: usize,
    pub samples: usize,
    pub draws: usize,
    pub seed: u64,
    pub max_norm: f64,
    pub passed: bool,
}

/// Rejection-samples `samples` points of dimension `n` with
/// `||δ(x)|| < 1 - SCAN_MARGIN` and reports `max ||F(x)||`. Passes iff the
/// maximum is at most `1 + SCAN_NORM_SLACK`.
///
/// Draw `i` uses stream `i` under `seed`, so the report does not depend on
/// evaluation order.
pub fn contractivity_scan(r: &Realization, n: usize, samples: usize, seed: u64) -> Result<ScanReport> {
    let residual = check_isometry(r)?;
    if residual > SCAN_ISOMETRY_TOL {
        return Err(Error::PreconditionViolation {
            what: "contractivity scan needs an isometric colligation",
            residual,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let scale = 0.5 / (n as f64).sqrt();
    let d = r.arity();
    let mut accepted = 0usize;
    let mut draws = 0usize;
    let mut max_norm: f64 = 0.0;
    while accepted < samples {
        let x = SampleRng::for_stream(seed, draws as u64).tuple(d, n, scale);
        draws += 1;
        if in_ball(&r.delta, &x, SCAN_MARGIN)? {
            accepted += 1;
            max_norm = max_norm.max(operator_norm(&eval_realization(r, &x)?)?);
        }
        if draws >= SCAN_STARVATION_DRAWS && (accepted as f64) < SCAN_MIN_ACCEPTANCE * draws as f64 {
            return Err(Error::SamplerStarvation { accepted, draws });
        }
    }
    Ok(ScanReport {
        dim: n,
        samples,
        draws,
        seed,
        max_norm,
        passed: max_norm <= 1.0 + SCAN_NORM_SLACK,
    })
}

/// Scalar Taylor coefficients of a one-variable realization at 0:
/// `A`, then `B (δ D)^k δ C` for `k = 0, 1, ...` with `δ(z) = z`.
///
/// Only defined when δ is the single variable `x^1`; used as an independent
/// check on extracted expansions.
pub fn scalar_neumann_coefficients(r: &Realization, max_degree: usize) -> Result<Vec<C64>> {
    if r.delta != delta_polydisk(1) {
        return Err(Error::InvalidArgument("scalar Neumann coefficients need δ(x) = x".into()));
    }
    let mut out = Vec::with_capacity(max_degree + 1);
    out.push(r.a);
    // δ = identity on ℳ, so B (δD)^k δ C = B D^k C
    let mut v = r.c.clone();
    for _ in 1..=max_degree {
        out.push((&r.b * &v)[(0, 0)]);
        v = &r.d * &v;
    }
    Ok(out)
}
