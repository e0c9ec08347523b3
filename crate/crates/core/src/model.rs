//! Core domain types: the ground-truth mixture, generated datasets and
//! estimation results, plus the permutation-invariant error metric.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;
const WEIGHT_ORDER_TOL: f64 = 1e-12;
const SYMMETRY_REL_TOL: f64 = 1e-10;

/// Ground-truth parameters of a two-component Gaussian mixture with a
/// shared covariance and an adversarial noise fraction w3 = 1 - w1 - w2.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    pub dim: usize,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub mu1: DVector<f64>,
    pub mu2: DVector<f64>,
    pub sigma: DMatrix<f64>,
}

impl MixtureModel {
    pub fn new(
        w1: f64,
        w2: f64,
        w3: f64,
        mu1: DVector<f64>,
        mu2: DVector<f64>,
        sigma: DMatrix<f64>,
    ) -> Result<Self> {
        let model = MixtureModel {
            dim: mu1.len(),
            w1,
            w2,
            w3,
            mu1,
            mu2,
            sigma,
        };
        validate_model(&model)?;
        Ok(model)
    }

    /// Spherical model with Sigma = sigma^2 I.
    pub fn spherical(
        w1: f64,
        w2: f64,
        w3: f64,
        mu1: DVector<f64>,
        mu2: DVector<f64>,
        sigma_scalar: f64,
    ) -> Result<Self> {
        let n = mu1.len();
        let sigma = DMatrix::identity(n, n) * (sigma_scalar * sigma_scalar);
        Self::new(w1, w2, w3, mu1, mu2, sigma)
    }

    /// Smallest eigenvalue of the covariance (used by validation and by
    /// the spherical check).
    pub fn sigma_min_eigenvalue(&self) -> f64 {
        self.sigma
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether Sigma = sigma^2 I within 1e-10 relative; returns the scalar
    /// variance when it is.
    pub fn spherical_variance(&self) -> Option<f64> {
        let n = self.dim;
        let mut diag_max: f64 = 0.0;
        for j in 0..n {
            diag_max = diag_max.max(self.sigma[(j, j)].abs());
        }
        let s2 = self.sigma[(0, 0)];
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { s2 } else { 0.0 };
                if (self.sigma[(i, j)] - expected).abs() > SYMMETRY_REL_TOL * diag_max.max(1.0) {
                    return None;
                }
            }
        }
        Some(s2)
    }
}

/// Enforces the mixture invariants: weights sum to one, the dominance
/// chain w1 >= w2 > w3 > 0, and a symmetric positive-definite covariance.
///
/// The w1/w2 comparison is non-strict (to tolerance): the exactly balanced
/// 20/20/1 configuration is a legitimate boundary input.
pub fn validate_model(m: &MixtureModel) -> Result<()> {
    let sum = m.w1 + m.w2 + m.w3;
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSumViolation { sum });
    }
    let ordered = m.w1 + WEIGHT_ORDER_TOL >= m.w2
        && m.w2 > m.w3 + WEIGHT_ORDER_TOL
        && m.w3 > 0.0;
    if !ordered {
        return Err(Error::WeightOrderViolation {
            w1: m.w1,
            w2: m.w2,
            w3: m.w3,
        });
    }
    if m.mu1.len() != m.dim || m.mu2.len() != m.dim {
        return Err(Error::DimensionMismatch {
            expected: m.dim,
            got: m.mu2.len(),
        });
    }
    if m.sigma.nrows() != m.dim || m.sigma.ncols() != m.dim {
        return Err(Error::NonPositiveDefiniteCovariance {
            reason: format!("shape {}x{}, expected {0}x{0}", m.sigma.nrows(), m.sigma.ncols()),
        });
    }
    let mut max_abs: f64 = 0.0;
    for v in m.sigma.iter() {
        max_abs = max_abs.max(v.abs());
    }
    for i in 0..m.dim {
        for j in (i + 1)..m.dim {
            if (m.sigma[(i, j)] - m.sigma[(j, i)]).abs() > SYMMETRY_REL_TOL * max_abs.max(1.0) {
                return Err(Error::NonPositiveDefiniteCovariance {
                    reason: format!("asymmetric at ({i},{j})"),
                });
            }
        }
    }
    let min_eig = m.sigma_min_eigenvalue();
    if !(min_eig > 0.0) {
        return Err(Error::NonPositiveDefiniteCovariance {
            reason: format!("smallest eigenvalue {min_eig}"),
        });
    }
    Ok(())
}

/// Which source a generated point came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    G1,
    G2,
    Noise,
}

impl Label {
    pub fn as_str(&self) -> &'static str {
        match self {
            Label::G1 => "G1",
            Label::G2 => "G2",
            Label::Noise => "NOISE",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "G1" => Some(Label::G1),
            "G2" => Some(Label::G2),
            "NOISE" => Some(Label::Noise),
            _ => None,
        }
    }
}

/// A point cloud, optionally carrying ground-truth labels and the seed
/// that generated it.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub points: Vec<DVector<f64>>,
    pub labels: Option<Vec<Label>>,
    pub seed: Option<u64>,
}

impl Dataset {
    pub fn new(points: Vec<DVector<f64>>, labels: Option<Vec<Label>>, seed: Option<u64>) -> Result<Self> {
        if let Some(first) = points.first() {
            let n = first.len();
            for p in &points {
                if p.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: p.len(),
                    });
                }
            }
        }
        if let Some(l) = &labels {
            if l.len() != points.len() {
                return Err(Error::DimensionMismatch {
                    expected: points.len(),
                    got: l.len(),
                });
            }
        }
        Ok(Dataset { points, labels, seed })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }

    /// Counts (m1, m2, m3) per label, when labels are present.
    pub fn label_counts(&self) -> Option<(usize, usize, usize)> {
        self.labels.as_ref().map(|ls| {
            let mut c = (0, 0, 0);
            for l in ls {
                match l {
                    Label::G1 => c.0 += 1,
                    Label::G2 => c.1 += 1,
                    Label::Noise => c.2 += 1,
                }
            }
            c
        })
    }

    /// Points carrying the given label.
    pub fn points_with_label(&self, label: Label) -> Vec<&DVector<f64>> {
        match &self.labels {
            Some(ls) => self
                .points
                .iter()
                .zip(ls)
                .filter(|(_, &l)| l == label)
                .map(|(p, _)| p)
                .collect(),
            None => Vec::new(),
        }
    }
}

/// Output of an estimation run: the two component means, the covariance
/// estimate, and run diagnostics (filter sizes, cutoffs, iteration counts).
#[derive(Debug, Clone)]
pub struct EstimationResult {
    pub mu1_hat: DVector<f64>,
    pub mu2_hat: DVector<f64>,
    pub sigma_hat: DMatrix<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

/// The per-component errors under the best label assignment.
///
/// Minimizes ||mu_hat_{pi(1)} - mu_1|| + ||mu_hat_{pi(2)} - mu_2|| over the
/// two assignments and returns the pair of terms for the winning one
/// (identity wins ties).
pub fn estimation_error_split(est: &EstimationResult, truth: &MixtureModel) -> Result<(f64, f64)> {
    if est.mu1_hat.len() != truth.dim || est.mu2_hat.len() != truth.dim {
        return Err(Error::DimensionMismatch {
            expected: truth.dim,
            got: est.mu1_hat.len(),
        });
    }
    let id = (
        (&est.mu1_hat - &truth.mu1).norm(),
        (&est.mu2_hat - &truth.mu2).norm(),
    );
    let swap = (
        (&est.mu2_hat - &truth.mu1).norm(),
        (&est.mu1_hat - &truth.mu2).norm(),
    );
    if id.0 + id.1 <= swap.0 + swap.1 {
        Ok(id)
    } else {
        Ok(swap)
    }
}

/// Total estimation error: min over component assignments of the sum of
/// per-component mean errors.
pub fn estimation_error(est: &EstimationResult, truth: &MixtureModel) -> Result<f64> {
    let (a, b) = estimation_error_split(est, truth)?;
    Ok(a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(mu1: DVector<f64>, mu2: DVector<f64>) -> EstimationResult {
        let n = mu1.len();
        EstimationResult {
            mu1_hat: mu1,
            mu2_hat: mu2,
            sigma_hat: DMatrix::identity(n, n),
            diagnostics: BTreeMap::new(),
        }
    }

    #[test]
    fn accepts_benchmark_weights() {
        let m = MixtureModel::spherical(
            0.8,
            0.16,
            0.04,
            DVector::zeros(2),
            DVector::from_vec(vec![3.0, 3.0]),
            1.0,
        );
        assert!(m.is_ok());
    }

    #[test]
    fn accepts_balanced_boundary() {
        // 20/20/1 split: w1 == w2 exactly.
        let m = MixtureModel::spherical(
            20.0 / 41.0,
            20.0 / 41.0,
            1.0 / 41.0,
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![3.0, 5.0]),
            1.0,
        );
        assert!(m.is_ok());
    }

    #[test]
    fn rejects_degenerate_weights() {
        let m = MixtureModel::spherical(
            0.5,
            0.5,
            0.0,
            DVector::zeros(2),
            DVector::zeros(2),
            1.0,
        );
        assert!(matches!(m, Err(Error::WeightOrderViolation { .. })));
    }

    #[test]
    fn rejects_misordered_weights() {
        let m = MixtureModel::spherical(
            0.2,
            0.7,
            0.1,
            DVector::zeros(2),
            DVector::zeros(2),
            1.0,
        );
        assert!(matches!(m, Err(Error::WeightOrderViolation { .. })));
    }

    #[test]
    fn rejects_weight_sum_off() {
        let m = MixtureModel::spherical(
            0.8,
            0.15,
            0.04,
            DVector::zeros(2),
            DVector::zeros(2),
            1.0,
        );
        assert!(matches!(m, Err(Error::WeightSumViolation { .. })));
    }

    #[test]
    fn rejects_indefinite_covariance() {
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let m = MixtureModel::new(
            0.8,
            0.16,
            0.04,
            DVector::zeros(2),
            DVector::zeros(2),
            sigma,
        );
        assert!(matches!(m, Err(Error::NonPositiveDefiniteCovariance { .. })));
    }

    #[test]
    fn error_zero_on_exact_recovery() {
        let truth = MixtureModel::spherical(
            0.8,
            0.16,
            0.04,
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![3.0, 5.0]),
            1.0,
        )
        .unwrap();
        let est = result(truth.mu1.clone(), truth.mu2.clone());
        assert_eq!(estimation_error(&est, &truth).unwrap(), 0.0);
        // Swapped estimates are fixed up by the permutation.
        let est = result(truth.mu2.clone(), truth.mu1.clone());
        assert_eq!(estimation_error(&est, &truth).unwrap(), 0.0);
    }

    #[test]
    fn error_direct_evaluation() {
        let truth = MixtureModel::spherical(
            0.8,
            0.16,
            0.04,
            DVector::from_vec(vec![0.0, 0.0]),
            DVector::from_vec(vec![1.0, 1.0]),
            1.0,
        )
        .unwrap();
        let est = result(
            DVector::from_vec(vec![0.0, 1.0]),
            DVector::from_vec(vec![1.0, 0.0]),
        );
        assert!((estimation_error(&est, &truth).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn error_dimension_mismatch() {
        let truth = MixtureModel::spherical(
            0.8,
            0.16,
            0.04,
            DVector::zeros(3),
            DVector::from_vec(vec![1.0, 1.0, 1.0]),
            1.0,
        )
        .unwrap();
        let est = result(DVector::zeros(2), DVector::zeros(2));
        assert!(matches!(
            estimation_error(&est, &truth),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dataset_rejects_ragged_points() {
        let pts = vec![DVector::zeros(2), DVector::zeros(3)];
        assert!(Dataset::new(pts, None, None).is_err());
    }

    #[test]
    fn spherical_detection() {
        let m = MixtureModel::spherical(
            0.8,
            0.16,
            0.04,
            DVector::zeros(3),
            DVector::from_vec(vec![5.0, 5.0, 5.0]),
            2.0,
        )
        .unwrap();
        assert!((m.spherical_variance().unwrap() - 4.0).abs() < 1e-12);
        let mut sigma = DMatrix::identity(2, 2);
        sigma[(0, 0)] = 4.0;
        let m = MixtureModel::new(
            0.8,
            0.16,
            0.04,
            DVector::zeros(2),
            DVector::from_vec(vec![9.0, 9.0]),
            sigma,
        )
        .unwrap();
        assert!(m.spherical_variance().is_none());
    }
}
