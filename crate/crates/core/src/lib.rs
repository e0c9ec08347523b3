//! Robust parameter estimation for two-component Gaussian mixtures
//! corrupted by adversarial noise.
//!
//! The centerpiece is a two-pass estimator: recover the dominant
//! component's mean and the shared covariance with corruption-tolerant
//! subroutines, rank every sample by Mahalanobis distance to that fit,
//! filter out the closest w1 mass, and estimate the minority component
//! from what survives. Around it sit the agnostic single-Gaussian
//! subroutines, a vanilla EM baseline, seeded synthetic data generation,
//! and numeric evaluators for the separation conditions, sample-complexity
//! expressions, and tail bounds that predict when the filter works.

pub mod agnostic;
pub mod alg1;
pub mod em;
pub mod error;
pub mod estimator;
pub mod linalg;
pub mod model;
pub mod synth;
pub mod theory;

pub use error::{Error, Result};
pub use model::{
    estimation_error, estimation_error_split, validate_model, Dataset, EstimationResult, Label,
    MixtureModel,
};
