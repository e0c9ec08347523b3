//! Runtime-selectable estimation strategies. Each algorithm sits behind
//! the `MixtureEstimator` trait and is constructed by name, so the CLI and
//! the benchmark harness pick methods from configuration.

use nalgebra::DVector;

use crate::alg1::{estimate_alg1, Alg1Config};
use crate::em::{estimate_em, EmConfig};
use crate::error::{Error, Result};
use crate::model::EstimationResult;

pub trait MixtureEstimator: Send + Sync {
    /// Registry name, as accepted by `make_estimator`.
    fn name(&self) -> &'static str;
    fn estimate(&self, points: &[DVector<f64>]) -> Result<EstimationResult>;
}

/// Everything needed to instantiate any registered estimator.
#[derive(Debug, Clone)]
pub struct EstimatorParams {
    pub alg1: Alg1Config,
    pub em: EmConfig,
}

impl EstimatorParams {
    pub fn new(w1_input: f64, em_seed: u64) -> Self {
        EstimatorParams {
            alg1: Alg1Config::new(w1_input),
            em: EmConfig {
                seed: em_seed,
                ..EmConfig::default()
            },
        }
    }
}

pub struct Alg1Estimator {
    pub cfg: Alg1Config,
}

impl MixtureEstimator for Alg1Estimator {
    fn name(&self) -> &'static str {
        "alg1"
    }

    fn estimate(&self, points: &[DVector<f64>]) -> Result<EstimationResult> {
        estimate_alg1(points, &self.cfg)
    }
}

pub struct EmEstimator {
    pub cfg: EmConfig,
}

impl MixtureEstimator for EmEstimator {
    fn name(&self) -> &'static str {
        "em"
    }

    fn estimate(&self, points: &[DVector<f64>]) -> Result<EstimationResult> {
        estimate_em(points, &self.cfg)
    }
}

/// Names accepted by `make_estimator`.
pub fn estimator_names() -> &'static [&'static str] {
    &["alg1", "em"]
}

/// Builds the estimator registered under `name`.
pub fn make_estimator(name: &str, params: &EstimatorParams) -> Result<Box<dyn MixtureEstimator>> {
    match name {
        "alg1" => Ok(Box::new(Alg1Estimator { cfg: params.alg1 })),
        "em" => Ok(Box::new(EmEstimator { cfg: params.em })),
        other => Err(Error::UnknownMethod(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_knows_both_methods() {
        let params = EstimatorParams::new(0.8, 0);
        for &name in estimator_names() {
            let est = make_estimator(name, &params).unwrap();
            assert_eq!(est.name(), name);
        }
        assert!(matches!(
            make_estimator("gradient-descent", &params),
            Err(Error::UnknownMethod(_))
        ));
    }
}
