use thiserror::Error;

use crate::params::AdmissibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("model rejected: PDE solution may not be unique\n{0}")]
    Rejected(AdmissibilityReport),

    /// A closed form or fast path was requested outside the regime where it is proven.
    #[error("regime error: {0}")]
    Regime(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("Riccati solution blew up at t={t}")]
    BlowUp { t: f64 },

    #[error("explicit scheme needs {steps} time steps, above the limit of {limit}")]
    CflViolation { steps: u64, limit: u64 },

    #[error("policy iteration did not converge within {iterations} iterations at t={t}")]
    PolicyDivergence { iterations: usize, t: f64 },

    #[error("point (t={t}, x={x}) lies outside the grid")]
    OutOfGrid { t: f64, x: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
