use thiserror::Error;

/// Errors raised by the phase-space formulas and the solvers built on them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state outside the phase space: {0}")]
    Domain(String),

    #[error("states are not connected by a {family}-wave (residual {residual:e})")]
    NotOnCurve { family: u8, residual: f64 },

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid pressure table: {0}")]
    InvalidTable(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("audit failure: {0}")]
    Audit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
