//! Numerical verification laboratory for warped-product Riemannian geometry.
//!
//! The crate evaluates curvature, intersection and spectral identities of
//! warped products `M ×_f N` with exact (forward-mode) derivatives of the warp,
//! quadrature, finite differences and discrete Laplace–Beltrami operators, and
//! reports every identity or inequality as a checked, reproducible record.

pub mod error;
pub mod geometry;
pub mod integral;
pub mod intersection;
pub mod quadrature;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod spectral;
pub mod warp;

pub use error::{LabError, Result};
