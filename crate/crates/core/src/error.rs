use thiserror::Error;

/// Errors raised by the geometric and spectral evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric is not symmetric positive definite at the evaluation point: {0}")]
    DegenerateMetric(String),
    #[error("coordinates outside the chart domain: {0}")]
    OutsideDomain(String),
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("degenerate immersion: {0}")]
    DegenerateImmersion(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("evaluation produced a non-finite value: {0}")]
    Evaluation(String),
    #[error("quadrature error: {0}")]
    Quadrature(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
