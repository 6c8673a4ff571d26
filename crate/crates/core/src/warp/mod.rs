//! Warping functions with machine-accurate derivatives.

pub mod expr;
pub mod field;
pub mod function;
pub mod jet;
pub mod schwarzschild;

pub use expr::Expr;
pub use field::ScalarFieldM;
pub use function::{catalog, Domain1D, MeanCurvatureProfile, SignReport, WarpingFunction};
pub use jet::{Jet2, JetN, JetScalar};
pub use schwarzschild::{schwarzschild_profile, SchwarzschildParams, SchwarzschildTable};
