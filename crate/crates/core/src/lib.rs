//! Numerical spin geometry on the 3-torus: eigenspinors of the spin Dirac
//! operator on flat and conformally-flat metrics, and the divergence-free
//! framings they induce through the quadratic map and the right quaternionic
//! action.
//!
//! Module map:
//! - [`clifford`]: exact pointwise algebra (Pauli matrices, quadratic map,
//!   quaternion action).
//! - [`domain`]: lattices, spin structures, grids, sampled fields, conformal
//!   factors, weighted inner products.
//! - [`dirac`]: the operator itself, closed-form and dense oracles, and the
//!   iterative eigensolver.
//! - [`framing`]: eigenspinor → framing conversion and conformal rescaling.
//! - [`verify`]: numerical certificates for every claimed property.

// Grid kernels couple one index to several arrays; plain indexed loops read
// better there than zipped iterator chains.
#![allow(clippy::needless_range_loop)]

pub mod clifford;
pub mod dirac;
pub mod domain;
pub mod error;
mod fft;
pub mod framing;
pub mod verify;

pub use error::{Error, Result};
