use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("quadrature did not converge (value {value}, error estimate {estimate:e})")]
    NonConvergence { value: String, estimate: f64 },

    #[error("abscissa {x} outside table range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("invalid table: {0}")]
    Table(String),

    #[error("insufficient decay at table ends: |f(end)| / max|f| = {ratio:e}")]
    InsufficientDecay { ratio: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
