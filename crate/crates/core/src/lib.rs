//! Sharp constants, maximiser spaces and stability for the Agmon-Hormander
//! adjoint Fourier restriction estimate on the sphere.
//!
//! The crate computes the optimal constant `C_d(rho)` of the estimate
//! `(1/rho) \int_{B_rho} |hat{f sigma}|^2 dx/(2 pi)^d <= C_d(rho) ||f||^2`,
//! classifies the maximiser space, computes the sharp stability constant
//! `S_d(rho)` with its equality space, and cross-checks every closed form
//! against independent brute-force and quadrature oracles.

pub mod analysis;
pub mod bessel;
pub mod cli;
pub mod coefficients;
pub mod error;
pub mod quadrature;
pub mod sharp;
pub mod sphere_oracle;
pub mod stability;

pub use error::{Error, Result};
