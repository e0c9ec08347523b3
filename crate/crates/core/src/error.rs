use thiserror::Error;

/// Errors raised by the estimation and diagnostic routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("weight ordering violated: expected w1 >= w2 > w3 > 0, got ({w1}, {w2}, {w3})")]
    WeightOrderViolation { w1: f64, w2: f64, w3: f64 },

    #[error("weights must sum to 1 within 1e-12, got sum {sum}")]
    WeightSumViolation { sum: f64 },

    #[error("covariance is not symmetric positive definite: {reason}")]
    NonPositiveDefiniteCovariance { reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid generation config: {0}")]
    InvalidConfig(String),

    #[error("input point set is empty")]
    EmptyInput,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("truncation fraction (1-eta-eps)(1-eta) = {fraction} outside (0, 1]")]
    FractionOutOfRange { fraction: f64 },

    #[error("covariance for Mahalanobis scoring is singular")]
    SingularCovariance,

    #[error("EM component {component} degenerated twice (responsibility sum below 1e-12)")]
    DegenerateComponent { component: usize },

    #[error("EM log-likelihood became non-finite at iteration {iteration}")]
    NonFiniteLikelihood { iteration: usize },

    #[error("covariance is not spherical (sigma^2 I) within 1e-10 relative")]
    NotSpherical,

    #[error("unknown estimation method '{0}'")]
    UnknownMethod(String),
}

pub type Result<T> = std::result::Result<T, Error>;
