//! The free algebra on `d` letters: words, polynomials and their evaluation
//! on matrix tuples.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::tuple::MatrixTuple;
use crate::C64;

/// A monomial `x^{j_1} x^{j_2} ... x^{j_k}`, letters zero-indexed. The empty
/// word is the unit.
///
/// Words are ordered graded-lexicographically: shorter words first, then
/// lexicographically by letter index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(j: usize) -> Self {
        Word(alloc::vec![j])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Every word of length `k` over `d` letters, in canonical order.
    pub fn all_of_length(d: usize, k: usize) -> Vec<Word> {
        let mut out = alloc::vec![Word::empty()];
        for _ in 0..k {
            out = out
                .into_iter()
                .flat_map(|w| (0..d).map(move |j| {
                    let mut v = w.0.clone();
                    v.push(j);
                    Word(v)
                }))
                .collect();
        }
        out
    }

    /// Number of words of length `1..=k` over `d` letters (saturating).
    pub fn count_up_to(d: usize, k: usize) -> usize {
        let mut total: usize = 0;
        let mut layer: usize = 1;
        for _ in 0..k {
            layer = layer.saturating_mul(d);
            total = total.saturating_add(layer);
        }
        total
    }
}

impl From<Vec<usize>> for Word {
    fn from(v: Vec<usize>) -> Self {
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}", j + 1)?;
        }
        Ok(())
    }
}

/// Finitely supported map from words to complex coefficients, in `d`
/// noncommuting variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FreePoly {
    arity: usize,
    terms: BTreeMap<Word, C64>,
}

impl FreePoly {
    pub fn zero(arity: usize) -> Self {
        FreePoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, C64::one())
    }

    pub fn constant(arity: usize, c: C64) -> Self {
        let mut p = Self::zero(arity);
        p.insert(Word::empty(), c);
        p
    }

    /// The variable `x^{j+1}` (zero-indexed `j`).
    pub fn var(arity: usize, j: usize) -> Result<Self> {
        Self::monomial(arity, Word::letter(j), C64::one())
    }

    pub fn monomial(arity: usize, word: Word, c: C64) -> Result<Self> {
        check_letters(&word, arity)?;
        let mut p = Self::zero(arity);
        p.insert(word, c);
        Ok(p)
    }

    /// Sums repeated words; drops terms that cancel to exactly zero.
    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (Word, C64)>) -> Result<Self> {
        let mut p = Self::zero(arity);
        for (w, c) in terms {
            check_letters(&w, arity)?;
            p.add_term(w, c);
        }
        Ok(p)
    }

    fn insert(&mut self, w: Word, c: C64) {
        if !c.is_zero() {
            self.terms.insert(w, c);
        }
    }

    fn add_term(&mut self, w: Word, c: C64) {
        match self.terms.entry(w) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    #[inline]
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical word order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> C64 {
        self.terms.get(w).copied().unwrap_or_else(C64::zero)
    }

    /// Length of the longest word, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms.keys().all(|w| w.len() == k)
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: other.arity,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), *c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-C64::one()))
    }

    /// Noncommutative product: convolution over word concatenation.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = Self::zero(self.arity);
        for (w, a) in &self.terms {
            out.insert(w.clone(), a * c);
        }
        out
    }

    /// Terms of degree exactly `k`.
    pub fn homogeneous_component(&self, k: usize) -> Self {
        FreePoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.len() == k)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }

    /// Substitution `x -> s x`: the degree-`k` part is multiplied by `s^k`.
    pub fn scale_vars(&self, s: C64) -> Self {
        let mut out = Self::zero(self.arity);
        for (w, c) in &self.terms {
            out.insert(w.clone(), c * s.powu(w.len() as u32));
        }
        out
    }

    /// Largest coefficient difference over the union of supports.
    pub fn max_coeff_distance(&self, other: &Self) -> f64 {
        let mut m: f64 = 0.0;
        for (w, c) in &self.terms {
            m = m.max((c - other.coefficient(w)).norm());
        }
        for (w, c) in &other.terms {
            if !self.terms.contains_key(w) {
                m = m.max(c.norm());
            }
        }
        m
    }

    /// `sum_w c_w x^{w_1} ... x^{w_k}`, with the empty word contributing
    /// `c * I_n`.
    ///
    /// Words are walked in lexicographic order so products of shared prefixes
    /// are computed once.
    pub fn evaluate(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        if x.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: x.arity(),
            });
        }
        let n = x.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut words: Vec<(&Word, &C64)> = self.terms.iter().collect();
        words.sort_by(|a, b| a.0 .0.cmp(&b.0 .0));
        // prefix_products[i] = product of the first i+1 letters of `current`
        let mut prefix_products: Vec<ComplexMatrix> = Vec::new();
        let mut current: &[usize] = &[];
        for (w, c) in words {
            let letters = w.letters();
            let shared = current
                .iter()
                .zip(letters)
                .take_while(|(a, b)| a == b)
                .count();
            prefix_products.truncate(shared);
            for (i, &j) in letters.iter().enumerate().skip(shared) {
                let next = if i == 0 {
                    x.component(j).clone()
                } else {
                    &prefix_products[i - 1] * x.component(j)
                };
                prefix_products.push(next);
            }
            current = letters;
            match prefix_products.last() {
                Some(p) => out.axpy(*c, p)?,
                None => {
                    for i in 0..n {
                        out[(i, i)] += *c;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reference evaluation: every word multiplied out independently.
    pub fn evaluate_naive(&self, x: &MatrixTuple) -> Result<ComplexMatrix> {
        if x.arity() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                found: x.arity(),
            });
        }
        let n = x.dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (w, c) in &self.terms {
            let mut m = ComplexMatrix::identity(n);
            for &j in w.letters() {
                m = &m * x.component(j);
            }
            out.axpy(*c, &m)?;
        }
        Ok(out)
    }
}

fn check_letters(w: &Word, arity: usize) -> Result<()> {
    match w.letters().iter().find(|&&j| j >= arity) {
        Some(&letter) => Err(Error::LetterOutOfRange { letter, arity }),
        None => Ok(()),
    }
}

impl fmt::Display for FreePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({}{:+}i) {}", c.re, c.im, w)?;
        }
        Ok(())
    }
}

impl Add for &FreePoly {
    type Output = FreePoly;

    fn add(self, rhs: &FreePoly) -> FreePoly {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &FreePoly {
    type Output = FreePoly;

    fn sub(self, rhs: &FreePoly) -> FreePoly {
        self.try_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl Mul for &FreePoly {
    type Output = FreePoly;

    fn mul(self, rhs: &FreePoly) -> FreePoly {
        self.try_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Neg for &FreePoly {
    type Output = FreePoly;

    fn neg(self) -> FreePoly {
        self.scale(-C64::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn x(j: usize) -> FreePoly {
        FreePoly::var(2, j).unwrap()
    }

    #[test]
    fn canonical_order_is_graded_lex() {
        let mut words = vec![Word::new(vec![1]), Word::new(vec![0, 0]), Word::empty(), Word::new(vec![0])];
        words.sort();
        assert_eq!(
            words,
            vec![Word::empty(), Word::new(vec![0]), Word::new(vec![1]), Word::new(vec![0, 0])]
        );
    }

    #[test]
    fn addition_cases() {
        let p = &(&x(0) * &x(1)) + &FreePoly::constant(2, c(3.0));
        assert_eq!(&p + &FreePoly::zero(2), p);
        assert!((&x(0) + &(-&x(0))).is_zero());
        let xy = &x(0) * &x(1);
        let twice = &xy + &xy;
        assert_eq!(twice.coefficient(&Word::new(vec![0, 1])), c(2.0));
        assert_eq!(twice.len(), 1);
    }

    #[test]
    fn product_is_noncommutative() {
        let one = FreePoly::one(2);
        assert_eq!(&one * &x(0), x(0));
        let xy = &x(0) * &x(1);
        let yx = &x(1) * &x(0);
        assert_ne!(xy, yx);
        assert_eq!(xy.coefficient(&Word::new(vec![0, 1])), c(1.0));
        assert_eq!(yx.coefficient(&Word::new(vec![1, 0])), c(1.0));
    }

    #[test]
    fn square_of_sum_brute_force() {
        let s = &x(0) + &x(1);
        let sq = &s * &s;
        // brute force: every word of length 2 appears once
        for w in Word::all_of_length(2, 2) {
            assert_eq!(sq.coefficient(&w), c(1.0), "word {w}");
        }
        assert_eq!(sq.len(), 4);
    }

    #[test]
    fn arity_mismatch() {
        let p = FreePoly::var(1, 0).unwrap();
        assert!(matches!(p.try_add(&x(0)), Err(Error::ArityMismatch { .. })));
        assert!(matches!(p.try_mul(&x(0)), Err(Error::ArityMismatch { .. })));
        assert!(FreePoly::var(2, 2).is_err());
    }

    #[test]
    fn unit_evaluates_to_identity() {
        let t = MatrixTuple::zeros(2, 3);
        assert_eq!(FreePoly::one(2).evaluate(&t).unwrap(), ComplexMatrix::identity(3));
    }

    #[test]
    fn commutator_of_shifts() {
        let p = &(&x(0) * &x(1)) - &(&x(1) * &x(0));
        let t = MatrixTuple::new(vec![
            ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap(),
            ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap(),
        ])
        .unwrap();
        let expected = ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert_eq!(p.evaluate(&t).unwrap(), expected);
        assert_eq!(p.evaluate_naive(&t).unwrap(), expected);
    }

    #[test]
    fn homogeneous_parts() {
        let p = FreePoly::from_terms(
            2,
            [
                (Word::empty(), c(3.0)),
                (Word::new(vec![0]), c(1.0)),
                (Word::new(vec![0, 1]), c(5.0)),
            ],
        )
        .unwrap();
        assert_eq!(p.homogeneous_component(0), FreePoly::constant(2, c(3.0)));
        assert_eq!(
            p.homogeneous_component(2),
            FreePoly::monomial(2, Word::new(vec![0, 1]), c(5.0)).unwrap()
        );
        let mut sum = FreePoly::zero(2);
        for k in 0..=3 {
            sum = &sum + &p.homogeneous_component(k);
        }
        assert_eq!(sum, p);
    }

    #[test]
    fn scale_vars_cases() {
        let p = &(&x(0) * &x(1)) + &FreePoly::constant(2, c(2.0));
        assert_eq!(p.scale_vars(c(1.0)), p);
        assert_eq!(p.scale_vars(c(0.0)), FreePoly::constant(2, c(2.0)));
        assert_eq!(p.scale_vars(c(2.0)).coefficient(&Word::new(vec![0, 1])), c(4.0));
    }

    #[test]
    fn word_counts() {
        assert_eq!(Word::count_up_to(3, 4), 3 + 9 + 27 + 81);
        assert_eq!(Word::all_of_length(3, 2).len(), 9);
        assert_eq!(Word::count_up_to(2, 0), 0);
    }
}
