//! Rounding of almost-commuting 2-local qubit Hamiltonians.
//!
//! Given H = Σ h_i with every pairwise commutator norm ≤ ε, the rounding
//! pipeline produces a nearby Hamiltonian whose terms commute exactly, with
//! the same supports, per-term distance ≤ 216·ε^(1/6) and global distance
//! ≤ 216·m·ε^(1/6). Everything the bounds promise is re-checked by dense
//! small-instance oracles in [`verify`], and the [`apps`] layer builds the
//! promise-gap reduction, Gibbs-sampling certificates and the commuting/
//! remainder simulation split on top.

pub mod apps;
pub mod cli;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod model;
pub mod pauli;
pub mod rounding;
pub mod verify;

pub use error::{Error, Result};
