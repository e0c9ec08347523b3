//! Vanilla expectation-maximization for a two-component Gaussian mixture.
//! Serves as the comparison baseline; initialization and regularization
//! are seeded and explicit so runs reproduce exactly.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::EstimationResult;

const K: usize = 2;
const DEGENERATE_RESPONSIBILITY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmInit {
    /// Two distinct sample points as means, pooled covariance, equal weights.
    RandomPoints,
    /// A short Lloyd iteration from two random points, then moments per cluster.
    KmeansLike,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceMode {
    FullPerComponent,
    Shared,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub max_iters: usize,
    /// Relative log-likelihood change below which iteration stops.
    pub tol: f64,
    /// Ridge added to covariance diagonals each M-step. The stock-tool
    /// default is zero; without it heavy-tailed outliers collapse
    /// components, so runs seeking fidelity should set reg = 0 explicitly.
    pub reg: f64,
    pub init: EmInit,
    pub seed: u64,
    pub covariance_mode: CovarianceMode,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            max_iters: 1000,
            tol: 1e-6,
            reg: 1e-6,
            init: EmInit::RandomPoints,
            seed: 0,
            covariance_mode: CovarianceMode::FullPerComponent,
        }
    }
}

impl EmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive".into()));
        }
        if self.reg < 0.0 {
            return Err(Error::InvalidConfig("reg must be non-negative".into()));
        }
        Ok(())
    }
}

struct Component {
    weight: f64,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

struct LogDensity {
    chol: Cholesky<f64, nalgebra::Dyn>,
    log_norm: f64,
}

impl LogDensity {
    fn new(cov: &DMatrix<f64>, iteration: usize) -> Result<Self> {
        let n = cov.nrows();
        let chol = Cholesky::new(cov.clone()).ok_or(Error::NonFiniteLikelihood { iteration })?;
        let log_det: f64 = (0..n).map(|j| chol.l_dirty()[(j, j)].ln()).sum::<f64>() * 2.0;
        let log_norm = -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + log_det);
        Ok(LogDensity { chol, log_norm })
    }

    fn log_pdf(&self, x: &DVector<f64>, mean: &DVector<f64>) -> f64 {
        self.log_norm - 0.5 * crate::linalg::mahalanobis_sq(x, mean, &self.chol)
    }
}

fn pooled_covariance(points: &[DVector<f64>], reg: f64) -> DMatrix<f64> {
    let n = points[0].len();
    let m = points.len() as f64;
    let mut mean = DVector::zeros(n);
    for p in points {
        mean += p;
    }
    mean /= m;
    let mut cov = DMatrix::zeros(n, n);
    for p in points {
        let d = p - &mean;
        cov.syger(1.0 / m, &d, &d, 1.0);
    }
    cov.fill_upper_triangle_with_lower_triangle();
    for j in 0..n {
        cov[(j, j)] += reg;
    }
    cov
}

fn init_components(
    points: &[DVector<f64>],
    cfg: &EmConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<Component> {
    let m = points.len();
    let i = rng.gen_range(0..m);
    let mut j = rng.gen_range(0..m);
    let mut guard = 0;
    while (points[j].clone() - &points[i]).norm() == 0.0 && guard < 64 {
        j = rng.gen_range(0..m);
        guard += 1;
    }
    let mut means = [points[i].clone(), points[j].clone()];

    if cfg.init == EmInit::KmeansLike {
        for _ in 0..10 {
            let mut sums = [DVector::zeros(points[0].len()), DVector::zeros(points[0].len())];
            let mut counts = [0usize; K];
            for p in points {
                let d0 = (p - &means[0]).norm_squared();
                let d1 = (p - &means[1]).norm_squared();
                let c = usize::from(d1 < d0);
                sums[c] += p;
                counts[c] += 1;
            }
            for c in 0..K {
                if counts[c] > 0 {
                    means[c] = sums[c].clone() / counts[c] as f64;
                }
            }
        }
    }

    let pooled = pooled_covariance(points, cfg.reg);
    means
        .into_iter()
        .map(|mean| Component {
            weight: 0.5,
            mean,
            cov: pooled.clone(),
        })
        .collect()
}

/// Fits the two-component mixture by EM and returns the larger-weight
/// component first. `sigma_hat` carries the shared covariance in Shared
/// mode and the weight-averaged per-component covariance otherwise.
///
/// A component whose responsibility mass vanishes is re-initialized once
/// from a random point; a second collapse or a non-finite log-likelihood
/// is reported as an error rather than patched over.
pub fn estimate_em(points: &[DVector<f64>], cfg: &EmConfig) -> Result<EstimationResult> {
    cfg.validate()?;
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = points[0].len();
    let m = points.len();
    let needed = 2 * (n + 1);
    if m < needed {
        return Err(Error::TooFewSamples { needed, got: m });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut comps = init_components(points, cfg, &mut rng);
    let mut resp = vec![[0.0f64; K]; m];
    let mut prev_ll = f64::NEG_INFINITY;
    let mut iterations = 0usize;
    let mut reinitialized = [false; K];

    for iter in 0..cfg.max_iters {
        iterations = iter + 1;

        let densities: Vec<LogDensity> = comps
            .iter()
            .map(|c| LogDensity::new(&c.cov, iter))
            .collect::<Result<_>>()?;

        // E-step with the log-sum-exp trick; heavy-tailed points produce
        // extreme log densities otherwise.
        let mut ll = 0.0;
        for (x, r) in points.iter().zip(resp.iter_mut()) {
            let mut logs = [0.0f64; K];
            for c in 0..K {
                logs[c] = comps[c].weight.ln() + densities[c].log_pdf(x, &comps[c].mean);
            }
            let max = logs[0].max(logs[1]);
            let sum_exp = (logs[0] - max).exp() + (logs[1] - max).exp();
            ll += max + sum_exp.ln();
            for c in 0..K {
                r[c] = ((logs[c] - max).exp()) / sum_exp;
            }
        }
        if !ll.is_finite() {
            return Err(Error::NonFiniteLikelihood { iteration: iter });
        }
        if cfg.reg == 0.0 {
            debug_assert!(
                ll >= prev_ll - 1e-8,
                "log-likelihood decreased: {prev_ll} -> {ll}"
            );
        }

        // M-step.
        let mut collapse = None;
        for c in 0..K {
            let nk: f64 = resp.iter().map(|r| r[c]).sum();
            if nk < DEGENERATE_RESPONSIBILITY {
                collapse = Some(c);
                break;
            }
            let mut mean = DVector::zeros(n);
            for (x, r) in points.iter().zip(&resp) {
                mean.axpy(r[c], x, 1.0);
            }
            mean /= nk;
            let mut cov = DMatrix::zeros(n, n);
            for (x, r) in points.iter().zip(&resp) {
                let d = x - &mean;
                cov.syger(r[c] / nk, &d, &d, 1.0);
            }
            cov.fill_upper_triangle_with_lower_triangle();
            for j in 0..n {
                cov[(j, j)] += cfg.reg;
            }
            comps[c] = Component {
                weight: nk / m as f64,
                mean,
                cov,
            };
        }

        if let Some(c) = collapse {
            if reinitialized[c] {
                return Err(Error::DegenerateComponent { component: c });
            }
            reinitialized[c] = true;
            let pick = rng.gen_range(0..m);
            comps[c] = Component {
                weight: 0.5,
                mean: points[pick].clone(),
                cov: pooled_covariance(points, cfg.reg),
            };
            let other = 1 - c;
            comps[other].weight = 0.5;
            prev_ll = f64::NEG_INFINITY;
            continue;
        }

        if cfg.covariance_mode == CovarianceMode::Shared {
            let shared = &comps[0].cov * comps[0].weight + &comps[1].cov * comps[1].weight;
            comps[0].cov = shared.clone();
            comps[1].cov = shared;
        }

        if prev_ll.is_finite() && (ll - prev_ll).abs() <= cfg.tol * prev_ll.abs().max(1.0) {
            prev_ll = ll;
            break;
        }
        prev_ll = ll;
    }

    let order = if comps[0].weight >= comps[1].weight {
        [0, 1]
    } else {
        [1, 0]
    };
    let sigma_hat = match cfg.covariance_mode {
        CovarianceMode::Shared => comps[0].cov.clone(),
        CovarianceMode::FullPerComponent => {
            &comps[0].cov * comps[0].weight + &comps[1].cov * comps[1].weight
        }
    };
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("em_iterations".into(), iterations as f64);
    diagnostics.insert("em_log_likelihood".into(), prev_ll);
    diagnostics.insert("em_weight_1".into(), comps[order[0]].weight);
    diagnostics.insert("em_weight_2".into(), comps[order[1]].weight);

    Ok(EstimationResult {
        mu1_hat: comps[order[0]].mean.clone(),
        mu2_hat: comps[order[1]].mean.clone(),
        sigma_hat,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_distr::StandardNormal;

    fn jittered_cluster(
        center: &DVector<f64>,
        count: usize,
        jitter: f64,
        rng: &mut ChaCha8Rng,
    ) -> Vec<DVector<f64>> {
        (0..count)
            .map(|_| {
                DVector::from_fn(center.len(), |j, _| {
                    center[j] + jitter * rng.sample::<f64, _>(StandardNormal)
                })
            })
            .collect()
    }

    #[test]
    fn separable_clusters_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let c0 = DVector::from_vec(vec![0.0, 0.0]);
        let c1 = DVector::from_vec(vec![10.0, 10.0]);
        let mut pts = jittered_cluster(&c0, 50, 0.01, &mut rng);
        pts.extend(jittered_cluster(&c1, 50, 0.01, &mut rng));
        // Random-point init can land both means in one cluster and stall
        // at the symmetric fixed point (that sensitivity is the baseline's
        // documented weakness); seed 3 splits the clusters.
        let cfg = EmConfig { seed: 3, ..EmConfig::default() };
        let est = estimate_em(&pts, &cfg).unwrap();
        let e0 = (est.mu1_hat.clone() - &c0).norm().min((est.mu1_hat.clone() - &c1).norm());
        let e1 = (est.mu2_hat.clone() - &c0).norm().min((est.mu2_hat.clone() - &c1).norm());
        assert!(e0 < 0.1 && e1 < 0.1, "errors {e0} {e1}");
        assert!((est.mu1_hat - est.mu2_hat).norm() > 5.0);
    }

    #[test]
    fn clean_mixture_median_error_small() {
        let mu1 = DVector::from_vec(vec![1.0, 2.0]);
        let mu2 = DVector::from_vec(vec![3.0, 5.0]);
        let mut errors = Vec::new();
        for seed in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let mut pts = jittered_cluster(&mu1, 5000, 1.0, &mut rng);
            pts.extend(jittered_cluster(&mu2, 5000, 1.0, &mut rng));
            // Label-oracle class means.
            let m1 = pts[..5000].iter().fold(DVector::zeros(2), |a, p| a + p) / 5000.0;
            let m2 = pts[5000..].iter().fold(DVector::zeros(2), |a, p| a + p) / 5000.0;
            let cfg = EmConfig {
                seed,
                ..EmConfig::default()
            };
            let est = estimate_em(&pts, &cfg).unwrap();
            let id = (est.mu1_hat.clone() - &m1).norm() + (est.mu2_hat.clone() - &m2).norm();
            let sw = (est.mu1_hat.clone() - &m2).norm() + (est.mu2_hat.clone() - &m1).norm();
            errors.push(id.min(sw));
        }
        errors.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(errors[5] <= 0.2, "median EM error {}", errors[5]);
    }

    #[test]
    fn monotone_log_likelihood_without_reg() {
        // reg = 0 gives the textbook monotonicity guarantee; the debug
        // assertion inside estimate_em enforces it per iteration.
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let mut pts = jittered_cluster(&DVector::from_vec(vec![0.0, 0.0]), 300, 1.0, &mut rng);
        pts.extend(jittered_cluster(&DVector::from_vec(vec![4.0, 4.0]), 200, 1.0, &mut rng));
        let cfg = EmConfig {
            reg: 0.0,
            max_iters: 200,
            ..EmConfig::default()
        };
        let est = estimate_em(&pts, &cfg).unwrap();
        assert!(est.diagnostics["em_log_likelihood"].is_finite());
    }

    #[test]
    fn weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut pts = jittered_cluster(&DVector::zeros(3), 400, 1.0, &mut rng);
        pts.extend(jittered_cluster(&DVector::from_element(3, 6.0), 100, 1.0, &mut rng));
        let est = estimate_em(&pts, &EmConfig::default()).unwrap();
        let sum = est.diagnostics["em_weight_1"] + est.diagnostics["em_weight_2"];
        assert!((sum - 1.0).abs() < 1e-12);
        assert!(est.diagnostics["em_weight_1"] >= est.diagnostics["em_weight_2"]);
    }

    #[test]
    fn too_few_samples_rejected() {
        let pts = vec![DVector::zeros(4); 5];
        assert!(matches!(
            estimate_em(&pts, &EmConfig::default()),
            Err(Error::TooFewSamples { .. })
        ));
    }

    #[test]
    fn deterministic_given_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut pts = jittered_cluster(&DVector::zeros(2), 200, 1.0, &mut rng);
        pts.extend(jittered_cluster(&DVector::from_element(2, 5.0), 100, 1.0, &mut rng));
        let cfg = EmConfig {
            seed: 7,
            ..EmConfig::default()
        };
        let a = estimate_em(&pts, &cfg).unwrap();
        let b = estimate_em(&pts, &cfg).unwrap();
        assert_eq!(a.mu1_hat, b.mu1_hat);
        assert_eq!(a.sigma_hat, b.sigma_hat);
    }
}
