//! Confidence intervals for linear functionals of eigenvectors under matrix
//! denoising and spiked covariance models, with the Monte Carlo harness used
//! to check their coverage.
//!
//! All indices (`j`, `k`, coordinate `i`) are zero-based.

pub mod error;
pub mod inference;
pub mod linalg;
pub mod md;
pub mod models;
pub mod montecarlo;
pub mod pca;
pub mod rng;
pub mod scalar;
pub mod theory;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix64 = linalg::Matrix<f64>;
pub type SymMatrix64 = linalg::SymMatrix<f64>;
pub type Spectral64 = linalg::SpectralDecomposition<f64>;
