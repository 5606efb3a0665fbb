//! Truncated Fock-space toolkit for parity-pseudo-Hermitian oscillators.
//!
//! The crate builds the non-Hermitian two-mode oscillator
//! `H = ½(p₁²+x₁²) + ½(p₂²+x₂²) + i[A(x₁+x₂) + B(p₁+p₂)]` as dense matrices,
//! constructs the positive metric `η₊ = P·V`, checks the ladder algebra and
//! time evolution against it, evaluates the position-space inner products by
//! quadrature, and does the same for the first-order noncommutative
//! extension.

pub mod cli;
pub mod error;
pub mod model;
pub mod ncmodel;
pub mod opalg;
pub mod position;
pub mod report;

pub use error::{Error, Result};
