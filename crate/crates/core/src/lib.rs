//! Adiabatic non-Abelian geometric phases for three-level quantum systems.
//!
//! A 3x3 Hermitian Hamiltonian with a doubly degenerate level carries a
//! U(1) phase on its simple level and a U(2) holonomy on its degenerate
//! level when it is transported slowly around a closed loop. This crate
//! decides when a Hamiltonian is doubly degenerate without solving its
//! cubic, reduces it to canonical coordinates `(r', s', t', gamma, theta)`,
//! writes down the eigenframes and connection one-forms in closed form and
//! integrates the path-ordered exponential along loops.
//!
//! Every closed form has a brute-force counterpart (a Jacobi eigensolver,
//! finite differences of gauge-fixed eigenvectors, discrete parallel
//! transport and direct Schrodinger integration) so the two can be checked
//! against each other.

pub mod connection;
pub mod degeneracy;
pub mod error;
pub mod hamiltonian;
pub mod holonomy;
pub mod linalg;
pub mod spectral;

pub use error::{Error, Result};

/// Library version, stamped on CLI output records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
