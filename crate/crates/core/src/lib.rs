//! Randomized quasi-Monte Carlo integration over mixture distributions with
//! one categorical variable.
//!
//! The first coordinate of each scrambled Sobol' point picks a stratum
//! (mixture component); the remaining coordinates are mapped through the
//! component's quantile functions. Sampling fractions can differ from the
//! mixture weights, with importance weights restoring unbiasedness.

pub mod allocation;
pub mod cli;
pub mod discrepancy;
pub mod error;
pub mod estimators;
pub mod mixture;
pub mod models;
pub mod qmc;
pub mod quadrature;
pub mod seed;
pub mod special;

pub use error::{Error, Result};
