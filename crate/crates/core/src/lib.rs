//! Free noncommutative function calculus on tuples of square complex matrices.
//!
//! The crate evaluates free polynomials, truncated NC power series and
//! transfer-function realizations at every matrix dimension, computes NC
//! derivatives by evaluating on block-bidiagonal matrices, extracts the
//! Taylor expansion at the origin as a free polynomial, and checks the
//! structural identities NC functions satisfy.
//!
//! Everything here is `no_std` + `alloc`; file formats and the command-line
//! front end live in the `ncfun` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x <= tol)` also rejects NaN

extern crate alloc;

pub mod error;
pub mod freepoly;
pub mod linalg;
pub mod ncderiv;
pub mod ncfun;
pub mod realization;
pub mod sample;
pub mod taylor;
pub mod tuple;
pub mod verify;

pub use error::{Error, Result};
pub use freepoly::{FreePoly, Word};
pub use linalg::{BlockLayout, ComplexMatrix};
pub use ncfun::{Domain, DomainKind, Handle, NcFunction, SeriesFunction};
pub use realization::{PolyMatrix, Realization};
pub use tuple::MatrixTuple;

/// Complex scalar used throughout: a pair of `f64`.
pub type C64 = num_complex::Complex64;
