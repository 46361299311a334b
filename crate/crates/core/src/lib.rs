//! Good and bad potentials for the finite-volume Anderson model `H_t = Δ + tV`
//! on periodic box grids.

// Validation uses `!(a < b)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod error;
pub mod grid;
pub mod perturbation;
pub mod probability;
pub mod selftest;
pub mod spectral;
pub mod symmetry;

pub use error::{Error, Result};
pub use grid::{SymmetricMatrix, TorusGrid};
pub use spectral::{EigenDecomposition, Potential};
