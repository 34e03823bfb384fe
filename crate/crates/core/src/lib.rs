//! Outage probability, ergodic rate and rate-constrained eigenvalue
//! densities of the Jacobi (truncated Haar unitary) MIMO channel.
//!
//! Three independent routes are provided and cross-validate each other:
//! Monte Carlo simulation ([`montecarlo`]), the exact finite-size closed
//! form ([`exact`]) and the large-deviation Coulomb-gas solver
//! ([`coulomb`]).

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod coulomb;
pub mod ensemble;
pub mod exact;
pub mod montecarlo;
pub mod specfun;

pub use error::{Error, Result};
