//! Roto-translation invariant Fourier descriptors over the semidiscrete
//! group SE(2,N), with the group-theoretic oracles that validate them and a
//! supervised evaluation harness.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod checks;
pub mod classify;
pub mod descriptors;
pub mod error;
pub mod imagecore;
pub mod se2n;
pub mod spectral;

pub use error::{Error, Result};
