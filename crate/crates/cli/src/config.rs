//! Benchmark campaign configuration: a TOML file resolved into concrete
//! per-dimension models, method settings, and seeds, with every default
//! made explicit in the echo.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::Path;

use rgmm::agnostic::Branch;
use rgmm::em::{CovarianceMode, EmConfig, EmInit};
use rgmm::model::MixtureModel;
use rgmm::synth::{Allocation, NoiseModel};

use crate::{CliError, CliResult};

pub const DEFAULT_ALPHA_GRID: [f64; 7] = [0.5, 0.67, 0.83, 1.0, 1.17, 1.33, 1.5];
pub const DEFAULT_LAMBDA_FACTOR: f64 = 4.0;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchFile {
    pub seed: u64,
    pub m: usize,
    pub dims: Vec<usize>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    #[serde(default = "default_allocation")]
    pub allocation: String,
    pub model: ModelSection,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub alg1: Alg1Section,
    #[serde(default)]
    pub em: EmSection,
    #[serde(default)]
    pub sensitivity: SensitivitySection,
}

fn default_reps() -> usize {
    50
}

fn default_methods() -> Vec<String> {
    vec!["alg1".into(), "em".into()]
}

fn default_allocation() -> String {
    "multinomial".into()
}

/// Either an explicit mixture (single dimension) or the auto-spherical
/// template: mu1 = 0, mu2 along the all-ones direction scaled so that the
/// separation parameter is `lambda_factor` times the first spherical
/// separation threshold, sigma = I.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub weights: [f64; 3],
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub lambda_factor: Option<f64>,
    #[serde(default)]
    pub mu1: Option<Vec<f64>>,
    #[serde(default)]
    pub mu2: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSection {
    #[serde(default = "default_noise_kind")]
    pub kind: String,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub location: Option<Vec<f64>>,
    #[serde(default)]
    pub point: Option<Vec<f64>>,
}

fn default_noise_kind() -> String {
    "cauchy".into()
}

fn default_scale() -> f64 {
    1.0
}

impl Default for NoiseSection {
    fn default() -> Self {
        NoiseSection {
            kind: default_noise_kind(),
            scale: 1.0,
            location: None,
            point: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Alg1Section {
    /// Mixing coefficient handed to the algorithm; defaults to the true w1.
    #[serde(default)]
    pub w1_input: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Second-pass corruption fraction as a multiple of (1 - w1_input).
    #[serde(default)]
    pub second_eta_factor: Option<f64>,
    #[serde(default)]
    pub damping_c: Option<f64>,
    #[serde(default)]
    pub branch: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct EmSection {
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub reg: Option<f64>,
    #[serde(default)]
    pub init: Option<String>,
    #[serde(default)]
    pub covariance_mode: Option<String>,
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySection {
    #[serde(default)]
    pub alpha_grid: Option<Vec<f64>>,
}

/// Alg1 knob bundle after defaulting; `w1_input` may still track the true
/// w1 per run (sensitivity overrides it per alpha).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Alg1Knobs {
    pub w1_input: Option<f64>,
    pub epsilon: f64,
    pub second_eta_factor: f64,
    pub damping_c: f64,
    pub branch: Branch,
}

impl Alg1Knobs {
    pub fn to_config(&self, true_w1: f64) -> rgmm::alg1::Alg1Config {
        let w1 = self.w1_input.unwrap_or(true_w1);
        rgmm::alg1::Alg1Config {
            w1_input: w1,
            agnostic: rgmm::agnostic::AgnosticConfig {
                eta: self.second_eta_factor * (1.0 - w1),
                epsilon: self.epsilon,
                damping_c: self.damping_c,
                branch: self.branch,
            },
        }
    }
}

/// Fully resolved campaign configuration.
#[derive(Debug, Clone)]
pub struct ResolvedBench {
    pub seed: u64,
    pub m: usize,
    pub dims: Vec<usize>,
    pub reps: usize,
    pub methods: Vec<String>,
    pub allocation: Allocation,
    pub weights: [f64; 3],
    pub explicit_model: Option<(Vec<f64>, Vec<f64>, Option<Vec<Vec<f64>>>)>,
    pub lambda_factor: f64,
    pub noise: NoiseSection,
    pub alg1: Alg1Knobs,
    pub em: EmConfig,
    pub alpha_grid: Vec<f64>,
}

pub fn parse_bench_file(path: &Path) -> CliResult<ResolvedBench> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let file: BenchFile =
        toml::from_str(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    resolve(file)
}

fn parse_branch(s: &str) -> CliResult<Branch> {
    match s {
        "gaussian" => Ok(Branch::Gaussian),
        "general" => Ok(Branch::General),
        other => Err(CliError::Validation(format!("unknown branch '{other}'"))),
    }
}

fn resolve(file: BenchFile) -> CliResult<ResolvedBench> {
    if file.dims.is_empty() {
        return Err(CliError::Validation("dims must be nonempty".into()));
    }
    if file.reps < 1 {
        return Err(CliError::Validation("reps must be >= 1".into()));
    }
    for m in &file.methods {
        if !rgmm::estimator::estimator_names().contains(&m.as_str()) {
            return Err(CliError::Validation(format!("unknown method '{m}'")));
        }
    }
    let allocation = match file.allocation.as_str() {
        "multinomial" => Allocation::Multinomial,
        "exact_counts" => Allocation::ExactCounts,
        other => {
            return Err(CliError::Validation(format!(
                "unknown allocation '{other}'"
            )))
        }
    };

    let model_kind = file.model.kind.as_deref().unwrap_or("auto_spherical");
    let explicit_model = match model_kind {
        "explicit" => {
            let mu1 = file.model.mu1.clone().ok_or_else(|| {
                CliError::Validation("explicit model requires mu1".into())
            })?;
            let mu2 = file.model.mu2.clone().ok_or_else(|| {
                CliError::Validation("explicit model requires mu2".into())
            })?;
            if file.dims != [mu1.len()] {
                return Err(CliError::Validation(
                    "explicit model requires dims == [len(mu1)]".into(),
                ));
            }
            Some((mu1, mu2, file.model.sigma.clone()))
        }
        "auto_spherical" => None,
        other => {
            return Err(CliError::Validation(format!(
                "unknown model kind '{other}'"
            )))
        }
    };

    let noise = file.noise.clone();
    match noise.kind.as_str() {
        "cauchy" | "point_mass" => {}
        other => {
            return Err(CliError::Validation(format!("unknown noise kind '{other}'")));
        }
    }
    if noise.kind == "point_mass" && noise.point.is_none() {
        return Err(CliError::Validation(
            "point_mass noise requires a point".into(),
        ));
    }

    let alg1_defaults = rgmm::alg1::Alg1Config::new(file.model.weights[0]);
    let alg1 = Alg1Knobs {
        w1_input: file.alg1.w1_input,
        epsilon: file.alg1.epsilon.unwrap_or(alg1_defaults.agnostic.epsilon),
        second_eta_factor: file.alg1.second_eta_factor.unwrap_or(0.5),
        damping_c: file
            .alg1
            .damping_c
            .unwrap_or(alg1_defaults.agnostic.damping_c),
        branch: match &file.alg1.branch {
            Some(s) => parse_branch(s)?,
            None => alg1_defaults.agnostic.branch,
        },
    };

    let em_defaults = EmConfig::default();
    let em = EmConfig {
        max_iters: file.em.max_iters.unwrap_or(em_defaults.max_iters),
        tol: file.em.tol.unwrap_or(em_defaults.tol),
        reg: file.em.reg.unwrap_or(em_defaults.reg),
        init: match file.em.init.as_deref() {
            None | Some("random_points") => EmInit::RandomPoints,
            Some("kmeans_like") => EmInit::KmeansLike,
            Some(other) => {
                return Err(CliError::Validation(format!("unknown EM init '{other}'")))
            }
        },
        seed: 0,
        covariance_mode: match file.em.covariance_mode.as_deref() {
            None | Some("full_per_component") => CovarianceMode::FullPerComponent,
            Some("shared") => CovarianceMode::Shared,
            Some(other) => {
                return Err(CliError::Validation(format!(
                    "unknown covariance mode '{other}'"
                )))
            }
        },
    };

    let alpha_grid = file
        .sensitivity
        .alpha_grid
        .clone()
        .unwrap_or_else(|| DEFAULT_ALPHA_GRID.to_vec());
    let w1 = file.model.weights[0];
    for &a in &alpha_grid {
        let w1p = 1.0 - a * (1.0 - w1);
        if !(a > 0.0 && w1p > 0.0 && w1p < 1.0) {
            return Err(CliError::Validation(format!(
                "alpha {a} puts w1' = {w1p} outside (0,1)"
            )));
        }
    }

    Ok(ResolvedBench {
        seed: file.seed,
        m: file.m,
        dims: file.dims,
        reps: file.reps,
        methods: file.methods,
        allocation,
        weights: file.model.weights,
        explicit_model,
        lambda_factor: file.model.lambda_factor.unwrap_or(DEFAULT_LAMBDA_FACTOR),
        noise,
        alg1,
        em,
        alpha_grid,
    })
}

impl ResolvedBench {
    /// Concrete mixture for dimension n. The auto-spherical template puts
    /// mu2 along the all-ones direction with lambda = lambda_factor times
    /// the first spherical separation threshold.
    pub fn model_for_dim(&self, n: usize) -> CliResult<MixtureModel> {
        let [w1, w2, w3] = self.weights;
        match &self.explicit_model {
            Some((mu1, mu2, sigma)) => {
                let sigma = match sigma {
                    None => DMatrix::identity(n, n),
                    Some(rows) => DMatrix::from_fn(n, n, |i, j| rows[i][j]),
                };
                MixtureModel::new(
                    w1,
                    w2,
                    w3,
                    DVector::from_vec(mu1.clone()),
                    DVector::from_vec(mu2.clone()),
                    sigma,
                )
                .map_err(CliError::from)
            }
            None => {
                let ratio = (w1 / w2).ln().max(0.0);
                let rhs = 2.0 * ((n as f64) * ratio).sqrt()
                    + 2.0 * ((n as f64) - 1.0).sqrt()
                    + 2.0 * ratio;
                let lambda = self.lambda_factor * rhs;
                let coord = (lambda / n as f64).sqrt();
                MixtureModel::spherical(
                    w1,
                    w2,
                    w3,
                    DVector::zeros(n),
                    DVector::from_element(n, coord),
                    1.0,
                )
                .map_err(CliError::from)
            }
        }
    }

    pub fn noise_model(&self, _n: usize) -> NoiseModel {
        match self.noise.kind.as_str() {
            "point_mass" => NoiseModel::PointMass {
                point: self.noise.point.clone().expect("validated"),
            },
            _ => NoiseModel::Cauchy {
                scale: self.noise.scale,
                location: self.noise.location.clone(),
            },
        }
    }

    /// Full echo of every effective parameter.
    pub fn echo(&self) -> Value {
        json!({
            "seed": self.seed,
            "m": self.m,
            "dims": self.dims,
            "reps": self.reps,
            "methods": self.methods,
            "allocation": match self.allocation {
                Allocation::Multinomial => "multinomial",
                Allocation::ExactCounts => "exact_counts",
            },
            "model": {
                "weights": self.weights,
                "kind": if self.explicit_model.is_some() { "explicit" } else { "auto_spherical" },
                "lambda_factor": self.lambda_factor,
                "explicit": self.explicit_model.as_ref().map(|(mu1, mu2, sigma)| json!({
                    "mu1": mu1, "mu2": mu2, "sigma": sigma,
                })),
            },
            "noise": {
                "kind": self.noise.kind,
                "scale": self.noise.scale,
                "location": self.noise.location,
                "point": self.noise.point,
            },
            "alg1": self.alg1,
            "em": self.em,
            "alpha_grid": self.alpha_grid,
        })
    }
}
