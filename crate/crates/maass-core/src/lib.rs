//! Numerics for Hecke–Maass forms on the modular surface `SL2(Z)\H`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; IO, caching and the command line live in the
//! companion `maass` crate.
//!
//! Module map:
//!
//! - [`specfun`]: complex log-gamma, scaled K-Bessel of imaginary order,
//!   J-Bessel of imaginary order, log-scale values.
//! - [`domain`]: reduction to the fundamental domain, quadrature grids,
//!   bump observables.
//! - [`automorphic`]: Hejhal solver, Maass forms, Eisenstein series.
//! - [`moments`]: joint moments, Gaussian constants, Parseval check.
//! - [`archimedean`]: the piecewise exponents `Q`, `Q1` and the Stirling weight `H`.
//! - [`kuznetsov`]: Kloosterman sums, averaging weights, Bessel transform,
//!   zeta on the 1-line, trace-formula harness.
//! - [`bounds`]: Hecke power combinatorics, log-L bounds, deviation counts,
//!   Chernoff integration, synthetic Satake spectra.

#![no_std]
#![allow(clippy::too_many_arguments)]
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod archimedean;
pub mod automorphic;
pub mod bounds;
pub mod domain;
mod error;
pub mod kuznetsov;
pub mod linalg;
pub mod moments;
pub mod primes;
pub mod quad;
pub mod specfun;

pub use error::{Error, ErrorCategory, Result};

/// `π/3`, the hyperbolic area of the modular surface.
pub const VOLUME: f64 = core::f64::consts::PI / 3.0;
