//! Simulation library for a charge qubit coupled to a Kerr-nonlinear
//! nanomechanical resonator.
//!
//! The library has two layers:
//!
//! - closed-form results for the resonant dressed-state dynamics
//!   ([`rabi`]) and for the engineered-decoherence factor of the qubit
//!   ([`decoherence`]), and
//! - truncated-Fock-space numerics ([`fock`], [`model`], [`numerics`])
//!   that propagate the exact Hamiltonians by Hermitian eigendecomposition
//!   and act as independent oracles for every closed form.
//!
//! [`sweep`] drives both layers over time grids and produces the CSV/JSON
//! output consumed by the `kerrjc` command-line tool.

pub mod decoherence;
pub mod error;
pub mod fock;
pub mod model;
pub mod numerics;
pub mod rabi;
pub mod sweep;

mod linalg;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
