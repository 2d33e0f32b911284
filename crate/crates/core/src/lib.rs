//! Simulation and verification toolkit for stochastic differential equations
//! and SPDEs in the random-field (Walsh) framework.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`]: Hermite polynomials, the normal CDF, log-gamma.
//! * [`noise`]: seeded Gaussian drivers (Brownian paths, white-noise sheets,
//!   fBm, homogeneous colored noise) and the field container.
//! * [`kernels`]: heat and wave fundamental solutions and covariance kernels.
//! * [`conditions`]: existence-condition checks and regularity predictions.
//! * [`solvers`]: Itô sums, Picard iteration, stochastic convolution, PAM schemes.
//! * [`moments`]: Monte Carlo moments, Lyapunov fits, Feynman-Kac and Hölder estimators.

pub mod conditions;
mod error;
pub mod kernels;
mod linalg;
pub mod moments;
pub mod noise;
pub mod parallel;
pub mod quadrature;
pub mod solvers;
pub mod special;

pub use error::{Error, Result};

/// Toolkit version embedded in artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
