//! Monte Carlo verification laboratory for the path-space calculus in
//! `pathspace-core`: a parallel estimator layer, closed-form oracles, the
//! inequality and identity checks, a batch experiment runner, and the CSV
//! reporting contract.

pub mod config;
pub mod csvout;
pub mod engine;
pub mod estimators;
pub mod functions;
pub mod pathdump;
pub mod report;
pub mod runner;

use pathspace_core::CoreError;

/// Errors of the lab layer: configuration problems, oracle gaps, numeric
/// blowups, and IO.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{bad} of {total} samples were non-finite (limit 0.1%)")]
    TooManyNonFinite { bad: usize, total: usize },
    #[error("estimate of E[F] is not positive; inequality terms undefined")]
    NonpositiveMass,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
