//! Numerical model of a random magnetic Schrödinger operator on a finite
//! cylinder: Landau-gauge discretization, Hermitian eigensolvers, edge
//! branches, current-based classification of eigenstates, the decoupling
//! apparatus, resolvent kernel special functions and ensemble experiments.
//!
//! Units are ħ = m = e = 1. The cylinder is `x ∈ ℝ`, `y ∈ [-L/2, L/2)` with
//! periodic `y`; the vector potential is `(0, Bx)` so that `p_y` is conserved
//! by every non-random part of the Hamiltonian.

pub mod basis;
pub mod classify;
pub mod config;
pub mod decouple;
pub mod edge;
pub mod eigensolve;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod operators;
pub mod runner;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Version string embedded into every emitted artifact.
pub const TOOL_VERSION: &str = concat!("qhedge ", env!("CARGO_PKG_VERSION"));
