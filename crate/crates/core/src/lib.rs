//! Compressed sensing for sparse Legendre expansions.
//!
//! The crate covers the whole pipeline used to study uniform-sampling
//! recovery of sparse Legendre coefficient vectors:
//!
//! * [`basis`]: orthonormal Legendre polynomials, the envelope bound and
//!   index sets;
//! * [`sampling`]: seeded uniform and Chebyshev sample sets, the test value
//!   `T(Q)` and preferable-set selection;
//! * [`measurement`]: normalized and preconditioned sampling matrices,
//!   sparse signals and observations;
//! * [`solver`]: basis pursuit (noiseless and noise-constrained), an
//!   exhaustive sparse oracle and recovery metrics;
//! * [`theory`]: restricted-eigenvalue tools, sample-complexity formulas,
//!   special functions and Monte Carlo lemma checks;
//! * [`experiments`]: deterministic batch experiments with CSV and SVG
//!   output.

// `!(x > t)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod experiments;
pub mod measurement;
pub mod rng;
pub mod sampling;
pub mod solver;
pub mod theory;

pub use error::{Error, Result};
