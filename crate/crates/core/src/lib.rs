//! Conditional quantum entropies on finite-dimensional density operators.
//!
//! The crate computes von Neumann, min-, max- and α-entropies of `A`
//! conditioned on `B`, smooths states into purified-distance balls to certify
//! smooth min-entropy lower bounds, and evaluates the finite-n equipartition
//! bound for `n` independent copies of a state. Every entropy is in bits.
//!
//! The numerical core is generic over [`scalar::Scalar`] (`f64` or `f32`);
//! the aliases below fix the precision for everyday use.
//!
//! ```
//! use qaep::entropy::{h_min, h_vn_cond};
//! use qaep::DensityOperator;
//!
//! let rho = DensityOperator::maximally_mixed(vec![2, 2]);
//! assert!((h_vn_cond(&rho).unwrap() - 1.0).abs() < 1e-12);
//! assert!((h_min(&rho).unwrap() - 1.0).abs() < 1e-8);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aep;
pub mod entropy;
pub mod error;
pub mod functional;
pub mod io;
pub mod linops;
pub mod scalar;
pub mod smooth;
pub mod state;
pub mod verify;

pub use error::{Error, Result};

pub type Matrix = linops::Matrix<f64>;
pub type HermitianMatrix = linops::HermitianMatrix<f64>;
pub type DensityOperator = state::DensityOperator<f64>;
pub type QuantumChannel = state::QuantumChannel<f64>;
pub type Isometry = state::Isometry<f64>;
pub type EntropyValue = entropy::EntropyValue<f64>;
pub type ScalarFunction = functional::ScalarFunction<f64>;
pub type SmoothingResult = smooth::SmoothingResult<f64>;
pub type AepBoundRow = aep::AepBoundRow<f64>;

pub type MatrixF32 = linops::Matrix<f32>;
pub type HermitianMatrixF32 = linops::HermitianMatrix<f32>;
pub type DensityOperatorF32 = state::DensityOperator<f32>;
pub type QuantumChannelF32 = state::QuantumChannel<f32>;
pub type IsometryF32 = state::Isometry<f32>;
pub type EntropyValueF32 = entropy::EntropyValue<f32>;
pub type ScalarFunctionF32 = functional::ScalarFunction<f32>;
pub type SmoothingResultF32 = smooth::SmoothingResult<f32>;
pub type AepBoundRowF32 = aep::AepBoundRow<f32>;
