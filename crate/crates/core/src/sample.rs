//! Seeded random inputs: complex Gaussian matrices and tuples, random free
//! polynomials, random isometries.
//!
//! Every generator is a ChaCha8 stream addressed by `(seed, stream)`, so a
//! sample can be regenerated from its index alone.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::Result;
use crate::freepoly::{FreePoly, Word};
use crate::linalg::ComplexMatrix;
use crate::tuple::MatrixTuple;
use crate::C64;

pub struct SampleRng {
    rng: ChaCha8Rng,
}

impl SampleRng {
    pub fn new(seed: u64) -> Self {
        Self::for_stream(seed, 0)
    }

    /// Independent stream `stream` under `seed`.
    pub fn for_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SampleRng { rng }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn index(&mut self, bound: usize) -> usize {
        (self.uniform() * bound as f64) as usize % bound.max(1)
    }

    /// Standard normal via Box-Muller.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
    }

    /// Circularly symmetric complex Gaussian with `E|z|^2 = 1`.
    pub fn complex_gaussian(&mut self) -> C64 {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        C64::new(s * self.gaussian(), s * self.gaussian())
    }

    /// Uniform on the closed unit disk.
    pub fn unit_disk(&mut self) -> C64 {
        let r = self.uniform().sqrt();
        C64::from_polar(r, core::f64::consts::TAU * self.uniform())
    }

    /// Matrix of independent complex Gaussians times `scale`.
    pub fn matrix(&mut self, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_gaussian() * scale)
    }

    /// Gaussian `n x n` matrix rescaled to operator norm `norm`.
    pub fn matrix_with_norm(&mut self, n: usize, norm: f64) -> Result<ComplexMatrix> {
        let m = self.matrix(n, n, 1.0);
        let current = crate::linalg::operator_norm(&m)?;
        Ok(if current == 0.0 { m } else { m.scale_real(norm / current) })
    }

    /// Tuple with Gaussian entries scaled by `scale`.
    pub fn tuple(&mut self, arity: usize, dim: usize, scale: f64) -> MatrixTuple {
        MatrixTuple::new((0..arity).map(|_| self.matrix(dim, dim, scale)).collect())
            .expect("components share a dimension")
    }

    /// Tuple whose components each have operator norm `norm`.
    pub fn tuple_with_norm(&mut self, arity: usize, dim: usize, norm: f64) -> Result<MatrixTuple> {
        let comps = (0..arity)
            .map(|_| self.matrix_with_norm(dim, norm))
            .collect::<Result<Vec<_>>>()?;
        MatrixTuple::new(comps)
    }

    /// Random polynomial of degree at most `max_degree`: each word is kept
    /// with probability `density`, with a coefficient uniform in the unit disk.
    pub fn poly(&mut self, arity: usize, max_degree: usize, density: f64) -> FreePoly {
        let mut terms = Vec::new();
        for k in 0..=max_degree {
            for w in Word::all_of_length(arity, k) {
                if self.uniform() < density {
                    terms.push((w, self.unit_disk()));
                }
            }
        }
        FreePoly::from_terms(arity, terms).expect("letters in range")
    }

    /// `rows x cols` matrix with orthonormal columns (`rows >= cols`), from
    /// Gram-Schmidt on a Gaussian matrix.
    pub fn isometry(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(rows >= cols, "an isometry needs rows >= cols");
        loop {
            let g = self.matrix(rows, cols, 1.0);
            if let Some(q) = orthonormal_columns(&g) {
                return q;
            }
        }
    }

    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        self.isometry(n, n)
    }
}

/// Modified Gram-Schmidt, applied twice for stability. `None` if the columns
/// are numerically dependent.
pub fn orthonormal_columns(a: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (rows, cols) = a.shape();
    let mut cols_v: Vec<Vec<C64>> = (0..cols).map(|j| (0..rows).map(|i| a[(i, j)]).collect()).collect();
    for j in 0..cols {
        for _ in 0..2 {
            for k in 0..j {
                let proj: C64 = cols_v[k]
                    .iter()
                    .zip(&cols_v[j])
                    .map(|(q, v)| q.conj() * v)
                    .fold(C64::zero(), |acc, z| acc + z);
                let qk = cols_v[k].clone();
                for (v, q) in cols_v[j].iter_mut().zip(&qk) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols_v[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for v in cols_v[j].iter_mut() {
            *v /= norm;
        }
    }
    Some(ComplexMatrix::from_fn(rows, cols, |i, j| cols_v[j][i]))
}
