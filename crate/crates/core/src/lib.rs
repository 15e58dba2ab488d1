//! Entanglement measures for small multi-qubit systems and numerical audits of
//! monogamy inequalities over sampled tripartite states.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex kernels (tensor product, partial trace,
//!   Hermitian eigensolver, PSD square root, spin flip).
//! - [`states`]: pure states, density matrices, ensembles, named states,
//!   Haar and Ginibre sampling, Schmidt decomposition.
//! - [`measures`]: entropy of entanglement, concurrence, entanglement of
//!   formation, tangle and a convex-roof optimizer.
//! - [`monogamy`]: per-state records and the audits run over them.
//! - [`locc`]: state-vector teleportation.

pub mod error;
pub mod linalg;
pub mod locc;
pub mod measures;
pub mod monogamy;
pub mod states;

pub use error::{Error, Result};
pub use num_complex::Complex64;
