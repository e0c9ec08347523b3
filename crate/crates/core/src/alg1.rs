//! The two-pass mixture estimator: estimate the dominant component's mean
//! and the shared covariance agnostically from the full sample, rank all
//! points by Mahalanobis distance to that estimate, drop the closest w1
//! mass, and run the agnostic mean again on the remainder to recover the
//! second component. Also the w1-perturbation sensitivity bound.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::agnostic::{agnostic_cov, agnostic_mean, AgnosticConfig, Branch};
use crate::error::{Error, Result};
use crate::linalg::mahalanobis_sq;
use crate::model::EstimationResult;

/// Configuration for the two-pass estimator.
///
/// `w1_input` is the mixing coefficient handed to the algorithm; it may
/// deliberately differ from the true w1 (the sensitivity sweep exploits
/// that). The rank rule is fixed: k = clamp(round(m * w1_input), 1, m-1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alg1Config {
    pub w1_input: f64,
    /// Settings for the second-pass mean estimate; `agnostic.eta` is the
    /// corruption fraction assumed inside the filtered set.
    pub agnostic: AgnosticConfig,
}

impl Alg1Config {
    /// Defaults for a given w1: truncation branch everywhere (the first
    /// pass faces corruption 1 - w1, which can approach one half, where
    /// damping breaks down), and a second-pass corruption fraction of
    /// (1 - w1) / 2, a conservative stand-in for the unknown noise share
    /// of the filtered set.
    pub fn new(w1_input: f64) -> Self {
        Alg1Config {
            w1_input,
            agnostic: AgnosticConfig {
                eta: 0.5 * (1.0 - w1_input),
                epsilon: 0.01,
                damping_c: 10.0,
                branch: Branch::General,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w1_input > 0.0 && self.w1_input < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "w1_input must lie in (0,1), got {}",
                self.w1_input
            )));
        }
        self.agnostic.validate()?;
        let first_pass = self.first_pass_config();
        first_pass.validate()
    }

    /// Config for the first-pass mean and covariance calls, which treat
    /// everything outside the dominant component as corruption.
    pub fn first_pass_config(&self) -> AgnosticConfig {
        AgnosticConfig {
            eta: 1.0 - self.w1_input,
            ..self.agnostic
        }
    }
}

/// Squared Mahalanobis distance of every point to (mu, sigma), computed
/// through a Cholesky solve.
pub fn mahalanobis_scores(
    points: &[DVector<f64>],
    mu: &DVector<f64>,
    sigma: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    let chol = Cholesky::new(sigma.clone()).ok_or(Error::SingularCovariance)?;
    Ok(points.iter().map(|x| mahalanobis_sq(x, mu, &chol)).collect())
}

/// Rank index for the filter: k = clamp(round(m * w1), 1, m - 1).
pub fn filter_rank(m: usize, w1: f64) -> usize {
    (((m as f64) * w1).round() as usize).clamp(1, m - 1)
}

/// Keeps every point whose score is >= the k-th smallest score (inclusive,
/// so ties may enlarge the kept set). With distinct scores the result has
/// exactly m - k + 1 points.
pub fn filter_top(points: &[DVector<f64>], scores: &[f64], w1: f64) -> Vec<DVector<f64>> {
    debug_assert_eq!(points.len(), scores.len());
    let m = points.len();
    let k = filter_rank(m, w1);
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cutoff = sorted[k - 1];
    points
        .iter()
        .zip(scores)
        .filter(|(_, &s)| s >= cutoff)
        .map(|(p, _)| p.clone())
        .collect()
}

/// Cutoff value used by `filter_top` for the same inputs.
pub fn filter_cutoff(scores: &[f64], w1: f64) -> f64 {
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted[filter_rank(scores.len(), w1) - 1]
}

/// Runs the full two-pass estimation.
///
/// Diagnostics record the filtered-set size, the Mahalanobis cutoff, and
/// the effective corruption fractions of both passes.
pub fn estimate_alg1(points: &[DVector<f64>], cfg: &Alg1Config) -> Result<EstimationResult> {
    cfg.validate()?;
    let m = points.len();
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    let n = points[0].len();
    let needed = 4.max(n + 1);
    if m < needed {
        return Err(Error::TooFewSamples { needed, got: m });
    }

    let first_pass = cfg.first_pass_config();
    let mu1_hat = agnostic_mean(points, &first_pass)?;
    let sigma_hat = agnostic_cov(points, 1.0 - cfg.w1_input, &cfg.agnostic)?;

    let scores = mahalanobis_scores(points, &mu1_hat, &sigma_hat)?;
    let cutoff = filter_cutoff(&scores, cfg.w1_input);
    let filtered = filter_top(points, &scores, cfg.w1_input);
    let mu2_hat = agnostic_mean(&filtered, &cfg.agnostic)?;

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("filtered_count".into(), filtered.len() as f64);
    diagnostics.insert("mahalanobis_cutoff".into(), cutoff);
    diagnostics.insert("first_pass_eta".into(), first_pass.eta);
    diagnostics.insert("second_pass_eta".into(), cfg.agnostic.eta);
    diagnostics.insert(
        "recursion_depth_bound".into(),
        (n as f64).log2().ceil() + 1.0,
    );

    Ok(EstimationResult {
        mu1_hat,
        mu2_hat,
        sigma_hat,
        diagnostics,
    })
}

/// Evaluates the spherical-case sensitivity bound on the shift of the
/// estimated means when the algorithm is fed w1' instead of w1:
///
///   alpha_k * ((|w1' - w1| + w3)/w2 + w3/(1 - w1') + eps) * sigma * sqrt(log n)
///
/// `alpha_k` is an existential constant; callers pick it (default 1).
#[allow(clippy::too_many_arguments)]
pub fn sensitivity_bound(
    w1_true: f64,
    w1_input: f64,
    w2: f64,
    w3: f64,
    sigma_scalar: f64,
    n: usize,
    epsilon: f64,
    alpha_k: f64,
) -> f64 {
    let perturbation = ((w1_input - w1_true).abs() + w3) / w2;
    let residual_noise = w3 / (1.0 - w1_input);
    alpha_k * (perturbation + residual_noise + epsilon) * sigma_scalar * (n as f64).ln().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn cloud(n: usize, m: usize, mu: &DVector<f64>, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
        (0..m)
            .map(|_| DVector::from_fn(n, |j, _| mu[j] + rng.sample::<f64, _>(StandardNormal)))
            .collect()
    }

    #[test]
    fn mahalanobis_identity_cases() {
        let mu = DVector::zeros(2);
        let id = DMatrix::identity(2, 2);
        let pts = vec![
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![0.0, 0.0]),
        ];
        let s = mahalanobis_scores(&pts, &mu, &id).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-15);

        let aniso = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]);
        let pts = vec![DVector::from_vec(vec![2.0, 0.0])];
        let s = mahalanobis_scores(&pts, &mu, &aniso).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn filter_top_direct_evaluation() {
        let pts: Vec<DVector<f64>> = (0..5).map(|i| DVector::from_vec(vec![i as f64])).collect();
        let scores = [0.1, 0.5, 0.2, 0.9, 0.3];
        let kept = filter_top(&pts, &scores, 0.6);
        assert_eq!(kept.len(), 3);
        let kept_ids: Vec<f64> = kept.iter().map(|p| p[0]).collect();
        assert_eq!(kept_ids, vec![1.0, 3.0, 4.0]);
        assert!((filter_cutoff(&scores, 0.6) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn filter_top_all_ties_keeps_everything() {
        let pts: Vec<DVector<f64>> = (0..4).map(|_| DVector::zeros(1)).collect();
        let scores = [1.0; 4];
        assert_eq!(filter_top(&pts, &scores, 0.5).len(), 4);
    }

    #[test]
    fn filter_top_small_w1_keeps_everything() {
        let pts: Vec<DVector<f64>> = (0..6).map(|i| DVector::from_vec(vec![i as f64])).collect();
        let scores = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        // w1 -> 0 clamps the rank to 1, so the cutoff is the minimum.
        assert_eq!(filter_top(&pts, &scores, 1e-9).len(), 6);
    }

    #[test]
    fn distinct_scores_kept_count() {
        let m = 101;
        let pts: Vec<DVector<f64>> = (0..m).map(|i| DVector::from_vec(vec![i as f64])).collect();
        let scores: Vec<f64> = (0..m).map(|i| i as f64).collect();
        for w1 in [0.2, 0.5, 0.8] {
            let k = filter_rank(m, w1);
            assert_eq!(filter_top(&pts, &scores, w1).len(), m - k + 1);
        }
    }

    #[test]
    fn well_separated_without_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 4;
        let mu1 = DVector::zeros(n);
        let mu2 = DVector::from_element(n, 1000.0 / (n as f64).sqrt());
        let mut pts = cloud(n, 8000, &mu1, &mut rng);
        let g2 = cloud(n, 2000, &mu2, &mut rng);
        let g2_mean = {
            let mut s = DVector::zeros(n);
            for p in &g2 {
                s += p;
            }
            s / 2000.0
        };
        pts.extend(g2);
        // Interleave so the covariance pairing sees both components.
        let mut rng2 = ChaCha8Rng::seed_from_u64(11);
        for i in (1..pts.len()).rev() {
            let j = rand::Rng::gen_range(&mut rng2, 0..=i);
            pts.swap(i, j);
        }
        let cfg = Alg1Config::new(0.8);
        let est = estimate_alg1(&pts, &cfg).unwrap();
        assert!((est.mu1_hat.clone() - &mu1).norm() < 0.1, "mu1 err {}", (est.mu1_hat.clone() - &mu1).norm());
        assert!(
            (est.mu2_hat.clone() - &g2_mean).norm() < 0.15,
            "mu2 vs labeled mean {}",
            (est.mu2_hat.clone() - &g2_mean).norm()
        );
        assert!((est.mu2_hat - &mu2).norm() < 0.2);
    }

    #[test]
    fn translation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 3;
        let mu1 = DVector::zeros(n);
        let mu2 = DVector::from_element(n, 8.0);
        let mut pts = cloud(n, 400, &mu1, &mut rng);
        pts.extend(cloud(n, 100, &mu2, &mut rng));
        let shift = DVector::from_vec(vec![5.0, -2.0, 0.5]);
        let shifted: Vec<DVector<f64>> = pts.iter().map(|p| p + &shift).collect();
        let cfg = Alg1Config::new(0.8);
        let a = estimate_alg1(&pts, &cfg).unwrap();
        let b = estimate_alg1(&shifted, &cfg).unwrap();
        assert!((b.mu1_hat - &a.mu1_hat - &shift).norm() < 1e-6);
        assert!((b.mu2_hat - &a.mu2_hat - &shift).norm() < 1e-6);
        assert!((b.sigma_hat - &a.sigma_hat).norm() < 1e-6);
    }

    #[test]
    fn degenerate_single_gaussian_does_not_crash() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 10;
        let mu = DVector::from_element(n, 2.0);
        let pts = cloud(n, 10_000, &mu, &mut rng);
        let cfg = Alg1Config::new(0.5);
        let est = estimate_alg1(&pts, &cfg).unwrap();
        assert!((est.mu1_hat.clone() - &mu).norm() < 0.3);
        assert!((est.mu2_hat.clone() - &mu).norm() < 0.3);

        // The second mean should track the retained shell's robust center:
        // compare against the truncated mean of the filtered set.
        let first = cfg.first_pass_config();
        let mu1 = agnostic_mean(&pts, &first).unwrap();
        let sigma = agnostic_cov(&pts, 0.5, &cfg.agnostic).unwrap();
        let scores = mahalanobis_scores(&pts, &mu1, &sigma).unwrap();
        let shell = filter_top(&pts, &scores, 0.5);
        let oracle = agnostic_mean(&shell, &cfg.agnostic).unwrap();
        assert!((est.mu2_hat - oracle).norm() < 0.2);
    }

    #[test]
    fn sensitivity_bound_values() {
        // Zero perturbation, zero noise, zero slack.
        assert_eq!(sensitivity_bound(0.8, 0.8, 0.16, 0.0, 1.0, 10, 0.0, 1.0), 0.0);
        // Linear in the perturbation term.
        let b1 = sensitivity_bound(0.8, 0.75, 0.16, 0.0, 1.0, 10, 0.0, 1.0);
        let b2 = sensitivity_bound(0.8, 0.70, 0.16, 0.0, 1.0, 10, 0.0, 1.0);
        assert!((b2 - 2.0 * b1).abs() < 1e-12);
        // Worked value: ((0.1+0.04)/0.16 + 0.04/0.3 + 0.1) * sqrt(ln 10).
        let b = sensitivity_bound(0.8, 0.7, 0.16, 0.04, 1.0, 10, 0.1, 1.0);
        assert!((b - 1.6818150684018713).abs() < 1e-9, "bound {b}");
    }
}
