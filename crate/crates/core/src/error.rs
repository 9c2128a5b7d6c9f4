use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid temperature t = {0} (must be finite and < 2)")]
    InvalidTemperature(f64),

    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("dimension mismatch in {op}: {left} vs {right}")]
    Dimension {
        op: &'static str,
        left: usize,
        right: usize,
    },

    #[error("temperature mismatch: t = {left} vs t = {right}")]
    TemperatureMismatch { left: f64, right: f64 },

    #[error("point outside the domain in {op}")]
    OutsideDomain { op: &'static str },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("matrix must be entrywise positive")]
    NonPositiveMatrix,

    #[error("no convergence in {op} after {iterations} iterations")]
    NoConvergence { op: &'static str, iterations: usize },

    #[error("optimizer diverged at iteration {iteration} (loss = {loss})")]
    Divergence { iteration: usize, loss: f64 },

    #[error("graph still disconnected after {0} resamples")]
    Disconnected(usize),
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
