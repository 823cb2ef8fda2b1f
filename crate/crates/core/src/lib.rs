//! Unitary best rational approximation of `e^{iωx}` on `[-1, 1]`.
//!
//! The main entry point is [`driver::compute_best`], which iterates rational
//! interpolation in corrected nodes until the phase error equioscillates.
//! [`omega_estimate`] predicts the frequency for a target error, and
//! [`aaa_lawson`] provides an independent approximation for cross-checks.

pub mod aaa_lawson;
pub mod driver;
pub mod equi_metrics;
pub mod error;
pub mod interpolation;
mod linalg;
pub mod node_correction;
pub mod numerics;
pub mod omega_estimate;

pub use driver::{compute_best, initial_nodes, restart, BestApproxConfig, BestApproximation, StrategyMode};
pub use equi_metrics::{local_error_maxima, sandwich, EquioscillationReport};
pub use error::{Error, Result};
pub use interpolation::{build_interpolant, NodeSet};
pub use linalg::linspace;
pub use numerics::{unitarity_defect, BarycentricRational, PoleZeroSet};
