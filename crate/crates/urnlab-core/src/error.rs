//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the analysis modules.
#[derive(Debug, Clone, Error)]
pub enum UrnError {
    /// A parameter that must be strictly positive (or an empty urn) was supplied.
    #[error("non-positive parameter: {0}")]
    NonPositiveParameter(String),

    /// One of the divisibility conditions required for the process never to
    /// request more balls than are present fails.
    #[error("tenability violation: {0}")]
    TenabilityViolation(String),

    /// A DP transition would produce a negative ball count from a reachable
    /// state. Can only happen on a validation bug, never on tenable input.
    #[error("internal tenability breach at time {n}: state x={x}")]
    InternalTenabilityBreach { n: u64, x: u64 },

    /// Series reversion met a vanishing leading coefficient.
    #[error("series reversion failure: {0}")]
    ReversionFailure(String),

    /// The singular expansion failed its internal exactness round-trip,
    /// falsifying the rational-coefficient normalization.
    #[error("singular-expansion normalization breach: {0}")]
    NormalizationBreach(String),

    /// Quadrature could not certify the requested tolerance.
    #[error("quadrature tolerance not met: estimated error {estimate:e} > target {target:e}")]
    ToleranceNotMet { estimate: f64, target: f64 },

    /// The continued argument jumped too much between adjacent path nodes.
    #[error("branch tracking failure: argument jump {jump} rad between path nodes near t={at}")]
    BranchTrackingFailure { jump: f64, at: String },

    /// Argument outside the documented domain.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Root bracketing failed (signals an evaluation failure upstream).
    #[error("root not bracketed on ({lo}, {hi})")]
    RootNotBracketed { lo: f64, hi: f64 },

    /// A non-rational coefficient path could not meet evaluation accuracy.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// Evaluation requested at (or numerically too close to) a pole.
    #[error("pole at z = {0}")]
    PoleAt(String),

    /// Truncated lattice sum tail bound exceeds the requested tolerance.
    #[error("lattice sum tail too large: bound {bound:e} > tolerance {tolerance:e}")]
    TailTooLarge { bound: f64, tolerance: f64 },

    /// Zero-variance law; standardization is undefined.
    #[error("degenerate distribution at n = {0}: variance is zero")]
    DegenerateDistribution(u64),
}

pub type Result<T> = std::result::Result<T, UrnError>;
