use thiserror::Error;

/// Every failure mode of the library.
///
/// Validation errors (bad parameters, wrong entry point, not applicable)
/// are distinguished from numerical failures so front ends can map them to
/// different exit codes via [`CsosError::is_validation`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CsosError {
    #[error("invalid theta context: {0}")]
    InvalidContext(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("theta series did not converge within {terms} terms")]
    SeriesConvergence { terms: usize },
    #[error("pole: {0}")]
    Pole(String),
    #[error("singular weight: {0}")]
    SingularWeight(String),
    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonConvergence { iterations: usize, residual: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("wrong entry point: {0}")]
    WrongEntryPoint(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("gauge error: {0}")]
    Gauge(String),
}

impl CsosError {
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            CsosError::InvalidContext(_)
                | CsosError::InvalidParams(_)
                | CsosError::WrongEntryPoint(_)
                | CsosError::NotApplicable(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, CsosError>;
