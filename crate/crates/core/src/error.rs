use thiserror::Error;

use crate::bessel::Order;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Scale factor of the power series over- or underflowed binary64.
    #[error("range error: series scale factor out of binary64 range for order {order} at x = {x}")]
    Range { order: Order, x: f64 },

    /// A zero refinement failed to converge inside its bracket.
    #[error("zero refinement for order {order} did not converge in bracket [{lo}, {hi}]")]
    ZeroRefinement { order: Order, lo: f64, hi: f64 },

    /// Adaptive quadrature exhausted its panel budget.
    #[error("quadrature error target not met after {panels} panels (best estimate {estimate})")]
    QuadratureBudget { panels: usize, estimate: f64 },

    /// rho sits inside a Bessel zero band and no zero hint was supplied.
    #[error("rho = {rho} is inside the zero band of J_{order}; supply a zero hint to select the exact case")]
    AmbiguousAtZero { order: Order, rho: f64 },

    /// A selector that the Bourget hypothesis excludes from vanishing was
    /// classified as zero; this indicates an evaluation bug, not mathematics.
    #[error("selector (J_{a} J_{b})({rho}) classified as zero, excluded by the Bourget hypothesis")]
    BourgetExcluded { a: Order, b: Order, rho: f64 },

    /// Internal consistency failure (certificates, invariants).
    #[error("internal error: {0}")]
    Internal(String),

    /// Malformed user input (CLI mixture specs, range specs, hints).
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
