//! Core numerics for multi-path entangled photon-pair experiments.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised in four layers:
//!
//! - [`qstate`]: bipartite path states, noise channels and measurement bases.
//! - [`measure`]: projective settings, Born probabilities, Poisson coincidence
//!   simulation and the density-matrix element estimators.
//! - [`certify`]: fidelity, Schmidt-number witness, entropic
//!   entanglement-of-formation bound, bootstrap errors and per-dimension
//!   (nested) analysis.
//! - [`optics`]: a Jones-calculus simulator over (lattice port x polarisation)
//!   modes, plus compilers and verifiers for the source array, the intensity
//!   regulator, two-dimensional subspace settings and product-MUB networks.
//!
//! File formats, configuration and the command line live in the `hdpath`
//! companion crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Float math comes from `num_traits::Float` (libm) on targets without std;
// modules import it unconditionally and allow the import to go unused.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod certify;
pub mod entropy;
mod error;
pub mod measure;
pub mod optics;
pub mod qstate;

pub use error::{Error, Result};

/// Complex amplitude type used throughout.
pub type C64 = num_complex::Complex64;
