use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (partial value {partial:e}, error estimate {error_estimate:e})"
    )]
    QuadratureNonConvergence {
        partial: f64,
        error_estimate: f64,
        evaluations: usize,
    },

    #[error("non-finite integrand value at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },

    #[error("series diverges: {0}")]
    Divergent(String),

    #[error("series did not converge within {terms} terms (partial sum {partial:e})")]
    SeriesNonConvergence { partial: f64, terms: usize },

    #[error("ill-conditioned fit (condition number {condition:.3e}); widen the sample range")]
    IllConditioned { condition: f64 },

    #[error("fit residual {residual:.3e} above threshold {threshold:.3e} (estimate {estimate})")]
    PoorFit {
        estimate: f64,
        residual: f64,
        threshold: f64,
    },

    #[error("kernel not DA-integrable: {0}")]
    NotIntegrable(String),

    #[error("derivative expansion inapplicable: {0}")]
    DeInapplicable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
