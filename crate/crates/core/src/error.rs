//! Error type shared by the path-space primitives.

use alloc::string::String;
use core::fmt;

/// Errors raised by grid validation, catalog lookups, and oracle dispatch.
#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// An evaluation time does not coincide with a grid knot.
    TimeOffGrid { t: f64 },
    /// The requested closed-form oracle does not exist for this manifold.
    UnsupportedOracle { what: String },
    /// A pathwise process was passed where a derivative oracle is required.
    MissingDerivativeOracle,
    /// Mismatched dimensions or lengths between arguments.
    Mismatch { what: String },
    /// Invalid parameter (non-positive radius, too few steps, ...).
    InvalidParameter { what: String },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::TimeOffGrid { t } => write!(f, "time {t} not on grid"),
            CoreError::UnsupportedOracle { what } => write!(f, "unsupported oracle: {what}"),
            CoreError::MissingDerivativeOracle => {
                write!(f, "pathwise process without derivative oracle")
            }
            CoreError::Mismatch { what } => write!(f, "mismatch: {what}"),
            CoreError::InvalidParameter { what } => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for CoreError {}
