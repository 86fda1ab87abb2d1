//! Finite element solver and convergence-study harness for the Poisson
//! problem `-Δu = δ_γ` with a line Dirac source on polygonal domains.
//!
//! Graded refinement toward fracture endpoints (and, optionally, domain
//! corners) recovers the optimal energy-norm rate for P1 and P2 elements.

pub mod config;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod mesh;
pub mod refine;
pub mod study;
pub mod vtk;

pub use error::{Error, Result};
