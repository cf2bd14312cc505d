//! Numerical laboratory for spectral asymptotics of tensor-product operators.
//!
//! The crate covers the whole chain from explicit one-dimensional spectra to
//! Weyl-type expansions of the eigenvalue counting function:
//!
//! - [`spectra`]: circle-Laplacian families and their tensor products
//! - [`counting`]: exact counting functions (divisor sieve, hyperbola method,
//!   shifted lattice counts, multiplicity-weighted `N(λ)`)
//! - [`constants`]: Euler–Mascheroni constant and its shifted analogues `γ_c`
//! - [`zeta`]: spectral zeta functions, their continuation and Laurent data
//! - [`weyl`]: mapping Laurent data at the first pole to counting asymptotics
//! - [`analysis`]: coefficient tables and remainder-exponent fits
//!
//! All public evaluation uses the variable `s` with sums `Σ λ^{-s}`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod analysis;
pub mod constants;
pub mod counting;
pub mod descriptor;
mod error;
pub mod format;
pub mod special;
pub mod spectra;
pub mod weyl;
pub mod zeta;

pub use error::{Error, Module, Result};
