use thiserror::Error;

/// Errors raised by the proximal MCMC toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("target does not provide a gradient")]
    GradientUnavailable,

    #[error("non-finite gradient at coordinate {index}")]
    NonFiniteGradient { index: usize },

    #[error("target does not provide a Hessian-like curvature")]
    CurvatureUnavailable,

    #[error("chain state became non-finite at iteration {iteration}")]
    NonFiniteState { iteration: usize },

    #[error("initial state has log-density {0}; MH samplers need a finite start")]
    InvalidInitialState(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate trace: {0}")]
    DegenerateTrace(&'static str),

    #[error("not enough samples: need at least {needed}, got {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

pub(crate) fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be non-negative and finite, got {v}"
        )))
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
