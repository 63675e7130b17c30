//! d-tuples of square matrices: the points NC functions are evaluated at.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{block_bidiagonal, block_diag, operator_norm, ComplexMatrix};
use crate::C64;

/// `x = (x^1, ..., x^d)` with every component `n x n`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixTuple {
    dim: usize,
    components: Vec<ComplexMatrix>,
}

impl MatrixTuple {
    pub fn new(components: Vec<ComplexMatrix>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyInput("tuple components"))?;
        let dim = first.rows();
        for c in &components {
            if c.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch {
                    op: "MatrixTuple::new",
                    left: (dim, dim),
                    right: c.shape(),
                });
            }
        }
        Ok(MatrixTuple { dim, components })
    }

    pub fn zeros(arity: usize, dim: usize) -> Self {
        MatrixTuple {
            dim,
            components: (0..arity).map(|_| ComplexMatrix::zeros(dim, dim)).collect(),
        }
    }

    /// Scalar point `(a_1 I_n, ..., a_d I_n)`.
    pub fn scalar(values: &[C64], dim: usize) -> Self {
        MatrixTuple {
            dim,
            components: values.iter().map(|&a| ComplexMatrix::scalar(dim, a)).collect(),
        }
    }

    /// The tuple with `I_n` in slot `slot` and zero elsewhere.
    pub fn unit(arity: usize, slot: usize, dim: usize) -> Self {
        let mut t = Self::zeros(arity, dim);
        t.components[slot] = ComplexMatrix::identity(dim);
        t
    }

    /// 1x1 tuple from scalars.
    pub fn from_scalars(values: &[C64]) -> Self {
        Self::scalar(values, 1)
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.components.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, r: usize) -> &ComplexMatrix {
        &self.components[r]
    }

    pub fn components(&self) -> &[ComplexMatrix] {
        &self.components
    }

    pub fn into_components(self) -> Vec<ComplexMatrix> {
        self.components
    }

    /// Applies `f` to every component. `f` must map `n x n` to `m x m`
    /// uniformly.
    pub fn map(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        Self::new(self.components.iter().map(f).collect())
    }

    fn check_compatible(&self, other: &Self, op: &'static str) -> Result<()> {
        if self.arity() != other.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: other.arity(),
            });
        }
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                op,
                left: (self.dim, self.dim),
                right: (other.dim, other.dim),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "tuple add")?;
        Ok(MatrixTuple {
            dim: self.dim,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "tuple sub")?;
        Ok(MatrixTuple {
            dim: self.dim,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        MatrixTuple {
            dim: self.dim,
            components: self.components.iter().map(|m| m.scale(c)).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `S x S^{-1}` componentwise.
    pub fn conjugate_by(&self, s: &ComplexMatrix, s_inv: &ComplexMatrix) -> Result<Self> {
        let mut out = Vec::with_capacity(self.arity());
        for c in &self.components {
            out.push(s.try_matmul(c)?.try_matmul(s_inv)?);
        }
        Self::new(out)
    }

    /// `max_r ||x^r||`.
    pub fn max_norm(&self) -> Result<f64> {
        let mut m: f64 = 0.0;
        for c in &self.components {
            m = m.max(operator_norm(c)?);
        }
        Ok(m)
    }

    /// Norm of the row `(x^1 x^2 ... x^d)`, i.e. `||sum_r x^r (x^r)*||^{1/2}`.
    pub fn row_norm(&self) -> Result<f64> {
        let n = self.dim;
        let mut row = ComplexMatrix::zeros(n, n * self.arity());
        for (r, c) in self.components.iter().enumerate() {
            row.set_submatrix(0, r * n, c)?;
        }
        operator_norm(&row)
    }

    /// `I_copies ⊗ x`: the direct sum of `copies` copies of `self`.
    pub fn amplify(&self, copies: usize) -> Self {
        MatrixTuple {
            dim: self.dim * copies,
            components: self
                .components
                .iter()
                .map(|c| block_diag(&alloc::vec![c.clone(); copies]))
                .collect(),
        }
    }

    /// Concatenates tuples of possibly different arities into one tuple at the
    /// shared dimension (used to view k-linear maps as functions of dk
    /// variables).
    pub fn concat(parts: &[MatrixTuple]) -> Result<Self> {
        let mut comps = Vec::new();
        for p in parts {
            comps.extend(p.components.iter().cloned());
        }
        Self::new(comps)
    }

    /// Splits into consecutive tuples of arity `d`.
    pub fn split(&self, d: usize) -> Result<Vec<MatrixTuple>> {
        if d == 0 || !self.arity().is_multiple_of(d) {
            return Err(Error::ArityMismatch {
                expected: d,
                found: self.arity(),
            });
        }
        self.components
            .chunks(d)
            .map(|c| MatrixTuple::new(c.to_vec()))
            .collect()
    }
}

/// `x_1 ⊕ ... ⊕ x_m` componentwise, at dimension `sum n_i`.
pub fn direct_sum(tuples: &[MatrixTuple]) -> Result<MatrixTuple> {
    let first = tuples.first().ok_or(Error::EmptyInput("direct_sum of no tuples"))?;
    let d = first.arity();
    if let Some(bad) = tuples.iter().find(|t| t.arity() != d) {
        return Err(Error::ArityMismatch {
            expected: d,
            found: bad.arity(),
        });
    }
    let components = (0..d)
        .map(|r| {
            let blocks: Vec<ComplexMatrix> = tuples.iter().map(|t| t.components[r].clone()).collect();
            block_diag(&blocks)
        })
        .collect();
    Ok(MatrixTuple {
        dim: tuples.iter().map(|t| t.dim).sum(),
        components,
    })
}

/// The tuple of `(k+1)n x (k+1)n` matrices with `xs` on the block diagonal
/// and `hs` on the block superdiagonal, componentwise.
pub fn bidiagonal_block(xs: &[MatrixTuple], hs: &[MatrixTuple]) -> Result<MatrixTuple> {
    if xs.len() != hs.len() + 1 {
        return Err(Error::LengthMismatch {
            points: xs.len(),
            directions: hs.len(),
        });
    }
    let first = &xs[0];
    for t in xs.iter().chain(hs) {
        first.check_compatible(t, "bidiagonal_block")?;
    }
    let components = (0..first.arity())
        .map(|r| {
            let diag: Vec<ComplexMatrix> = xs.iter().map(|t| t.components[r].clone()).collect();
            let sup: Vec<ComplexMatrix> = hs.iter().map(|t| t.components[r].clone()).collect();
            block_bidiagonal(&diag, &sup)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixTuple {
        dim: first.dim * xs.len(),
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn s(v: f64) -> MatrixTuple {
        MatrixTuple::from_scalars(&[C64::new(v, 0.0)])
    }

    #[test]
    fn direct_sum_singleton_and_scalars() {
        let x = s(2.0);
        assert_eq!(direct_sum(core::slice::from_ref(&x)).unwrap(), x);
        let got = direct_sum(&[s(2.0), s(3.0)]).unwrap();
        assert_eq!(
            got.component(0),
            &ComplexMatrix::from_real_rows(&[[2.0, 0.0], [0.0, 3.0]]).unwrap()
        );
    }

    #[test]
    fn direct_sum_is_associative() {
        let (a, b, c) = (s(1.0), s(-2.0), MatrixTuple::unit(1, 0, 2));
        let left = direct_sum(&[direct_sum(&[a.clone(), b.clone()]).unwrap(), c.clone()]).unwrap();
        let right = direct_sum(&[a.clone(), direct_sum(&[b.clone(), c.clone()]).unwrap()]).unwrap();
        assert_eq!(left, right);
        assert_eq!(left, direct_sum(&[a, b, c]).unwrap());
    }

    #[test]
    fn direct_sum_errors() {
        assert!(matches!(direct_sum(&[]), Err(Error::EmptyInput(_))));
        let two = MatrixTuple::zeros(2, 1);
        assert!(matches!(
            direct_sum(&[s(1.0), two]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn bidiagonal_cases() {
        let x = MatrixTuple::unit(2, 1, 2);
        assert_eq!(bidiagonal_block(core::slice::from_ref(&x), &[]).unwrap(), x);
        let jet = bidiagonal_block(&[s(0.0), s(0.0)], &[s(1.0)]).unwrap();
        assert_eq!(
            jet.component(0),
            &ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap()
        );
        let three = bidiagonal_block(&[s(1.0), s(2.0), s(3.0)], &[s(1.0), s(1.0)]).unwrap();
        assert_eq!(
            three.component(0),
            &ComplexMatrix::from_real_rows(&[[1.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 3.0]]).unwrap()
        );
        assert!(matches!(
            bidiagonal_block(&[s(1.0), s(2.0)], &[s(1.0), s(1.0)]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn new_rejects_mixed_dimensions() {
        let r = MatrixTuple::new(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(3, 3)]);
        assert!(r.is_err());
        assert!(MatrixTuple::new(vec![ComplexMatrix::zeros(2, 3)]).is_err());
        assert!(MatrixTuple::new(vec![]).is_err());
    }

    #[test]
    fn row_norm_of_units() {
        // (I, I) has row norm sqrt(2)
        let t = MatrixTuple::scalar(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)], 3);
        assert!((t.row_norm().unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!((t.max_norm().unwrap() - 1.0).abs() < 1e-12);
    }
}
