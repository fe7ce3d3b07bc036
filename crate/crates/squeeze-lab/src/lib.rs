//! Numerical laboratory for generalized n-photon squeezing in
//! finite-dimensional Fock-space truncations.
//!
//! The crate builds truncated squeezing Hamiltonians (with optional Kerr
//! regularization) in Jacobi form, evolves the vacuum across a squeezing
//! parameter grid, analyses spectra (symmetry, zero modes, power-law level
//! structure, eigenvector localization), numerically classifies essential
//! self-adjointness of the underlying infinite Jacobi operators, and drives
//! parity/sweep experiments with CSV/JSON emission from a CLI.

pub mod chebyshev;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod expm;
pub mod io;
pub mod operators;
pub mod presets;
pub mod propagate;
pub mod sa_probe;
pub mod spectral;
pub mod tridiag;

pub use error::{Error, Result};
