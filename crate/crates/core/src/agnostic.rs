//! Robust single-Gaussian estimation under an eta fraction of malicious
//! points: exponential outlier damping, interval/ball outlier truncation,
//! a recursive spectral mean estimator, and a covariance estimator built
//! on the pairing trick x' = (x_i - x_{i+m/2}) / sqrt(2).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    coordinate_median, median, quantile_type1, sorted_symmetric_eigen, weighted_covariance,
    weighted_mean,
};

/// Quantile of the standard normal at one standard deviation, Phi(1).
/// The 1-D scale estimator reads off this quantile so that on clean
/// Gaussian data quantile - median = sigma.
pub const SIGMA_QUANTILE: f64 = 0.8413447460685429;

/// Floor for the 1-D scale estimate on degenerate (constant) samples.
pub const SIGMA_FLOOR: f64 = 1e-12;

/// Ball re-centering iterations in the truncation preprocessing of the
/// mean estimator.
const CONCENTRATION_STEPS: usize = 3;

/// Relative eigenvalue floor applied when re-symmetrizing the covariance
/// estimate; keeps the result invertible for Mahalanobis scoring.
pub const PSD_CLAMP_REL: f64 = 1e-8;
/// Absolute fallback when the pre-clamp estimate is identically zero.
pub const PSD_CLAMP_ABS: f64 = 1e-12;

/// Which preprocessing the mean estimator runs before taking moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Exponential down-weighting by squared distance to the coordinate
    /// median; suited to Gaussian inliers with a modest noise fraction.
    Gaussian,
    /// Hard truncation to the densest interval/ball; makes no shape
    /// assumption and tolerates corruption fractions close to one half.
    General,
}

/// How a weighted sample was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Damped,
    Truncated,
    /// One-dimensional Gaussian base case: no weighting applies and the
    /// consumer should take a median. Replaces the omega = -1 sentinel.
    GaussianBase,
}

/// A point set with per-point weights in [0, 1].
#[derive(Debug, Clone)]
pub struct WeightedSample {
    pub points: Vec<DVector<f64>>,
    pub weights: Vec<f64>,
    pub mode: SampleMode,
}

/// Parameters for the agnostic estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgnosticConfig {
    /// Assumed corruption fraction in [0, 1/2) (truncation only).
    pub eta: f64,
    /// Accuracy slack; enters the truncation fraction (1-eta-eps)(1-eta).
    pub epsilon: f64,
    /// Damping scale constant C in s^2 = C * tr(Sigma).
    pub damping_c: f64,
    pub branch: Branch,
}

impl Default for AgnosticConfig {
    fn default() -> Self {
        AgnosticConfig {
            eta: 0.1,
            epsilon: 0.01,
            damping_c: 10.0,
            branch: Branch::Gaussian,
        }
    }
}

impl AgnosticConfig {
    pub fn validate(&self) -> Result<()> {
        let f = truncation_fraction(self.eta, self.epsilon);
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::FractionOutOfRange { fraction: f });
        }
        Ok(())
    }
}

fn truncation_fraction(eta: f64, epsilon: f64) -> f64 {
    (1.0 - eta - epsilon) * (1.0 - eta)
}

/// Result of the robust 1-D scale estimate.
#[derive(Debug, Clone, Copy)]
pub struct Sigma1d {
    pub value: f64,
    /// Set when the sample was constant and the floor was returned.
    pub degenerate: bool,
}

/// Robust standard deviation of a 1-D sample: the Phi(1)-quantile minus
/// the location estimate, floored at SIGMA_FLOOR.
///
/// On eta-corrupted Gaussian data |sigma_hat^2 - sigma^2| = O(eta sigma^2).
pub fn robust_sigma_1d(xs: &[f64], mu_hat: f64) -> Result<Sigma1d> {
    if xs.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: xs.len(),
        });
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let raw = quantile_type1(&sorted, SIGMA_QUANTILE) - mu_hat;
    if raw > SIGMA_FLOOR {
        Ok(Sigma1d {
            value: raw,
            degenerate: false,
        })
    } else {
        Ok(Sigma1d {
            value: SIGMA_FLOOR,
            degenerate: true,
        })
    }
}

/// Exponential outlier damping: w_i = exp(-||x_i - a||^2 / s^2) with a the
/// coordinate-wise median and s^2 = C * tr-estimate, the trace estimated
/// by summing squared robust 1-D scales along the coordinate axes.
///
/// In one dimension no damping applies (GaussianBase mode, unit weights).
pub fn outlier_damping(points: &[DVector<f64>], cfg: &AgnosticConfig) -> Result<WeightedSample> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: points.len(),
        });
    }
    let n = points[0].len();
    if n == 1 {
        return Ok(WeightedSample {
            points: points.to_vec(),
            weights: vec![1.0; points.len()],
            mode: SampleMode::GaussianBase,
        });
    }
    let center = coordinate_median(points);
    let mut trace_estimate = 0.0;
    let mut col = Vec::with_capacity(points.len());
    for j in 0..n {
        col.clear();
        col.extend(points.iter().map(|p| p[j]));
        let s = robust_sigma_1d(&col, center[j])?;
        trace_estimate += s.value * s.value;
    }
    let s2 = (cfg.damping_c * trace_estimate).max(SIGMA_FLOOR);
    let weights = points
        .iter()
        .map(|p| (-(p - &center).norm_squared() / s2).exp())
        .collect();
    Ok(WeightedSample {
        points: points.to_vec(),
        weights,
        mode: SampleMode::Damped,
    })
}

/// Smallest window of k consecutive sorted values; ties broken toward the
/// earlier start. Returns (lo, hi) bounds of the winning window.
fn smallest_interval(sorted: &[f64], k: usize) -> (f64, f64) {
    debug_assert!(k >= 1 && k <= sorted.len());
    let mut best = (sorted[0], sorted[k - 1]);
    let mut best_width = best.1 - best.0;
    for i in 1..=(sorted.len() - k) {
        let width = sorted[i + k - 1] - sorted[i];
        if width < best_width {
            best_width = width;
            best = (sorted[i], sorted[i + k - 1]);
        }
    }
    best
}

/// Hard outlier truncation: keep the densest region holding a
/// (1-eta-eps)(1-eta) fraction of the points.
///
/// In one dimension that region is the smallest interval; otherwise the
/// per-coordinate interval means form a center and the minimum-radius
/// ball around it is kept. Output weights are all one.
pub fn outlier_truncation(
    points: &[DVector<f64>],
    eta: f64,
    epsilon: f64,
) -> Result<WeightedSample> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let fraction = truncation_fraction(eta, epsilon);
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::FractionOutOfRange { fraction });
    }
    let m = points.len();
    let n = points[0].len();
    let k = ((fraction * m as f64).ceil() as usize).clamp(1, m);

    if n == 1 {
        let mut sorted: Vec<f64> = points.iter().map(|p| p[0]).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (lo, hi) = smallest_interval(&sorted, k);
        let kept: Vec<DVector<f64>> = points
            .iter()
            .filter(|p| p[0] >= lo && p[0] <= hi)
            .cloned()
            .collect();
        let count = kept.len();
        return Ok(WeightedSample {
            points: kept,
            weights: vec![1.0; count],
            mode: SampleMode::Truncated,
        });
    }

    let mut center = DVector::zeros(n);
    let mut col = Vec::with_capacity(m);
    for j in 0..n {
        col.clear();
        col.extend(points.iter().map(|p| p[j]));
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let (lo, hi) = smallest_interval(&col, k);
        let mut sum = 0.0;
        let mut count = 0usize;
        for p in points {
            if p[j] >= lo && p[j] <= hi {
                sum += p[j];
                count += 1;
            }
        }
        center[j] = sum / count as f64;
    }

    let mut dists: Vec<f64> = points.iter().map(|p| (p - &center).norm()).collect();
    let mut sorted_dists = dists.clone();
    sorted_dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let radius = sorted_dists[k - 1];
    let kept: Vec<DVector<f64>> = points
        .iter()
        .zip(dists.drain(..))
        .filter(|(_, d)| *d <= radius)
        .map(|(p, _)| p.clone())
        .collect();
    let count = kept.len();
    Ok(WeightedSample {
        points: kept,
        weights: vec![1.0; count],
        mode: SampleMode::Truncated,
    })
}

/// Cap on exhaustive densest-point candidate scans; above it a fixed
/// stride subsample of candidate centers is used instead.
const DENSEST_SCAN_BUDGET: usize = 200_000_000;
const DENSEST_SUBSAMPLE: usize = 64;

fn kth_smallest(values: &mut [f64], k: usize) -> f64 {
    let (_, v, _) = values.select_nth_unstable_by(k - 1, |a, b| a.partial_cmp(b).unwrap());
    *v
}

fn ball_select(points: &[DVector<f64>], center: &DVector<f64>, k: usize) -> (f64, Vec<usize>) {
    let dists: Vec<f64> = points.iter().map(|p| (p - center).norm()).collect();
    let radius = kth_smallest(&mut dists.clone(), k);
    let kept = dists
        .into_iter()
        .enumerate()
        .filter(|(_, d)| *d <= radius)
        .map(|(i, _)| i)
        .collect();
    (radius, kept)
}

/// Refines the truncation core by concentration: from several candidate
/// centers, alternately select the k nearest points and re-center on
/// their mean, then keep the start whose final ball is smallest.
///
/// The per-coordinate intervals choose their windows independently, so on
/// multimodal data the interval center can land between modes where the
/// single fixed ball straddles them; concentration started from a dense
/// point converges onto one mode, and the minimum-radius comparison picks
/// the genuinely densest core.
fn concentrated_core(points: &[DVector<f64>], interval_core: &WeightedSample) -> WeightedSample {
    let m = points.len();
    let n = points[0].len();
    let k = interval_core.points.len().min(m).max(1);

    let mut candidates: Vec<DVector<f64>> = vec![
        weighted_mean(&interval_core.points, &interval_core.weights),
        coordinate_median(points),
    ];
    // Densest sample point: smallest distance to its k-th nearest
    // neighbour, scanned exhaustively when affordable.
    let scan_points: Vec<usize> = if m * m * n <= DENSEST_SCAN_BUDGET {
        (0..m).collect()
    } else {
        let stride = m.div_ceil(DENSEST_SUBSAMPLE);
        (0..m).step_by(stride).collect()
    };
    let mut best_idx = scan_points[0];
    let mut best_radius = f64::INFINITY;
    let mut dists = vec![0.0f64; m];
    for &i in &scan_points {
        for (j, p) in points.iter().enumerate() {
            dists[j] = (p - &points[i]).norm();
        }
        let r = kth_smallest(&mut dists, k);
        if r < best_radius {
            best_radius = r;
            best_idx = i;
        }
    }
    candidates.push(points[best_idx].clone());

    let mut best: Option<(f64, Vec<usize>)> = None;
    for start in &candidates {
        let mut center = start.clone();
        let mut selection = ball_select(points, &center, k);
        for _ in 0..CONCENTRATION_STEPS {
            let mut mean = DVector::zeros(n);
            for &i in &selection.1 {
                mean += &points[i];
            }
            mean /= selection.1.len() as f64;
            if mean == center {
                break;
            }
            center = mean;
            let next = ball_select(points, &center, k);
            if next.1 == selection.1 {
                selection = next;
                break;
            }
            selection = next;
        }
        if best.as_ref().map_or(true, |(r, _)| selection.0 < *r) {
            best = Some(selection);
        }
    }
    let (_, kept_idx) = best.expect("at least one candidate");
    let kept: Vec<DVector<f64>> = kept_idx.iter().map(|&i| points[i].clone()).collect();
    let count = kept.len();
    WeightedSample {
        points: kept,
        weights: vec![1.0; count],
        mode: SampleMode::Truncated,
    }
}

/// Recursive spectral mean estimator.
///
/// Preprocess (damping or truncation per the branch), then split the space
/// into the span V of the top ceil(n/2) principal components of the
/// weighted covariance and its complement W; recurse on the V-coordinates
/// of the full input and average the W-coordinates of the preprocessed
/// sample. The 1-D base case is the median (Gaussian branch) or the mean
/// of the truncated sample (general branch). Depth is ceil(log2 n) + 1.
pub fn agnostic_mean(points: &[DVector<f64>], cfg: &AgnosticConfig) -> Result<DVector<f64>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    if points.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: points.len(),
        });
    }
    cfg.validate()?;

    let prepared = match cfg.branch {
        Branch::Gaussian => outlier_damping(points, cfg)?,
        Branch::General => {
            let interval_core = outlier_truncation(points, cfg.eta, cfg.epsilon)?;
            let n = points[0].len();
            if n >= 2 {
                concentrated_core(points, &interval_core)
            } else {
                interval_core
            }
        }
    };

    let n = points[0].len();
    if n == 1 {
        let values: Vec<f64> = prepared.points.iter().map(|p| p[0]).collect();
        let v = match prepared.mode {
            SampleMode::GaussianBase => median(&values),
            _ => values.iter().sum::<f64>() / values.len() as f64,
        };
        return Ok(DVector::from_vec(vec![v]));
    }

    let mean = weighted_mean(&prepared.points, &prepared.weights);
    let cov = weighted_covariance(&prepared.points, &prepared.weights, &mean);
    let (eigenvalues, eigenvectors) = sorted_symmetric_eigen(&cov);

    // All mass in a point: the weighted mean is already the answer.
    if eigenvalues[0] <= PSD_CLAMP_ABS {
        return Ok(mean);
    }

    let top = n.div_ceil(2);
    let v_basis = eigenvectors.columns(0, top).into_owned();
    let w_basis = eigenvectors.columns(top, n - top).into_owned();

    // Recurse on coordinates of the preprocessed sample expressed in the V
    // basis, so the subproblem has dimension ceil(n/2) and both halves of
    // the estimate come from the same cleaned set. Recursing on the raw
    // input instead lets successive levels lock onto different clusters
    // when the corruption fraction is near one half. The truncation branch
    // removes its eta mass once, at the top level; deeper levels keep only
    // the epsilon trim, otherwise the kept fraction compounds to nothing
    // on small samples.
    let projected: Vec<DVector<f64>> = prepared
        .points
        .iter()
        .map(|p| v_basis.transpose() * p)
        .collect();
    let child_cfg = match cfg.branch {
        Branch::General => AgnosticConfig { eta: 0.0, ..*cfg },
        Branch::Gaussian => *cfg,
    };
    let mu_v = agnostic_mean(&projected, &child_cfg)?;

    let w_coords: Vec<DVector<f64>> = prepared
        .points
        .iter()
        .map(|p| w_basis.transpose() * p)
        .collect();
    let mu_w = weighted_mean(&w_coords, &prepared.weights);

    Ok(v_basis * mu_v + w_basis * mu_w)
}

/// Covariance estimator via the pairing trick.
///
/// Pairs the first floor(m/2) points with the second floor(m/2) (odd m
/// drops the last point), forms x' = (x_i - x_{i+m/2})/sqrt(2) so that
/// E[x' x'^T] = Sigma regardless of the means, runs the general-branch
/// mean estimator on the outer products flattened to R^{n^2}, then
/// re-symmetrizes and clamps eigenvalues up to a small positive floor.
pub fn agnostic_cov(
    points: &[DVector<f64>],
    eta: f64,
    cfg: &AgnosticConfig,
) -> Result<DMatrix<f64>> {
    if points.len() < 4 {
        return Err(Error::TooFewSamples {
            needed: 4,
            got: points.len(),
        });
    }
    let n = points[0].len();
    let half = points.len() / 2;
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let lifted: Vec<DVector<f64>> = (0..half)
        .map(|i| {
            let d = (&points[i] - &points[i + half]) * inv_sqrt2;
            let mut flat = DVector::zeros(n * n);
            for j in 0..n {
                for k in 0..n {
                    flat[j * n + k] = d[j] * d[k];
                }
            }
            flat
        })
        .collect();

    let mean_cfg = AgnosticConfig {
        eta,
        epsilon: cfg.epsilon,
        damping_c: cfg.damping_c,
        branch: Branch::General,
    };
    let flat_mean = agnostic_mean(&lifted, &mean_cfg)?;

    let mut est = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            est[(j, k)] = flat_mean[j * n + k];
        }
    }
    let symmetrized = (&est + est.transpose()) * 0.5;
    let (eigenvalues, eigenvectors) = sorted_symmetric_eigen(&symmetrized);
    let floor = if eigenvalues[0] > 0.0 {
        PSD_CLAMP_REL * eigenvalues[0]
    } else {
        PSD_CLAMP_ABS
    };
    let clamped = DVector::from_iterator(n, eigenvalues.iter().map(|&l| l.max(floor)));
    Ok(&eigenvectors * DMatrix::from_diagonal(&clamped) * eigenvectors.transpose())
}
