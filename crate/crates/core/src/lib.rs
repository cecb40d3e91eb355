//! Exact finite-dimensional realisation of the Bhat–Skeide interpolation of
//! commuting contraction tuples.
//!
//! The crate builds the discretised semigroup `T^(N)` on `ℓ²(T_N^d) ⊗ ℂ^dim`
//! from a commuting tuple of contractions, together with the torus operators
//! it is assembled from, dilation fixtures, a von Neumann inequality checker
//! with certified torus suprema, and structure-preservation predicates.
//!
//! Everything here is allocation-only (`alloc`), no IO. File formats and the
//! command-line front end live in the companion `semigroup-cli` crate.
//!
//! Module map:
//!
//! * [`linalg`]: dense complex matrices, Kronecker products, operator norm,
//!   Hermitian eigendecomposition, PSD square roots, matrix exponential.
//! * [`torus`]: grid times, Koopman shifts, indicator projections, the
//!   commutation relation between them.
//! * [`interp`]: contraction tuples, the discretised semigroup, compressions,
//!   time-scaled blends and their error sweep.
//! * [`dilation`]: Parrott tuples, power-dilation verification, block unitary
//!   dilations of a single contraction.
//! * [`vn`]: multivariate polynomials, functional calculus, torus suprema and
//!   the von Neumann inequality checker and random search.
//! * [`structure`]: operator class predicates and preservation suites.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dilation;
mod error;
pub mod interp;
pub mod linalg;
mod math;
pub mod structure;
pub mod torus;
pub mod vn;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Tolerance, C64};

/// Default cap on the number of entries of any matrix the crate materialises.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 20;
