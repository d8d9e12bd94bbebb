//! Equilibration diagnostics for finite-dimensional open quantum systems.
//!
//! The crate builds the infinite-time averaging map of a system–bath
//! Hamiltonian, measures how much information about the initial system
//! state survives in the equilibrium state ("information trapping"), and
//! evaluates the correlation and equilibration bounds that control it.
//! Closed-form models (Jaynes–Cummings, a two-band structured bath and
//! product-eigenbasis Hamiltonians) double as oracles for the dense pipeline.

pub mod averaging;
pub mod diagnostics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod random;
pub mod superop;

pub use error::{Error, Result};
pub use linalg::{BipartiteDims, CMatrix, DensityMatrix, PureState};
pub use superop::Superoperator;
