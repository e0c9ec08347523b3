//! Small numeric helpers shared across the estimators.

use nalgebra::{DMatrix, DVector};

/// Type-1 quantile: the order statistic at rank ceil(q*m), 1-based.
///
/// Matches the order-statistic convention y_(k) used throughout the
/// estimators; `q` must lie in (0, 1].
pub fn quantile_type1(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let m = sorted.len();
    let k = ((q * m as f64).ceil() as usize).clamp(1, m);
    sorted[k - 1]
}

/// Standard median: middle order statistic, or the midpoint of the two
/// central ones for even counts. The midpoint form keeps the median of a
/// symmetric sample at the symmetry center, which the damping weights
/// rely on; rank selections elsewhere stay type-1.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Coordinate-wise median of a point set.
pub fn coordinate_median(points: &[DVector<f64>]) -> DVector<f64> {
    let n = points[0].len();
    let mut out = DVector::zeros(n);
    let mut col = Vec::with_capacity(points.len());
    for j in 0..n {
        col.clear();
        col.extend(points.iter().map(|p| p[j]));
        out[j] = median(&col);
    }
    out
}

/// Weighted mean normalized by the total weight.
pub fn weighted_mean(points: &[DVector<f64>], weights: &[f64]) -> DVector<f64> {
    let n = points[0].len();
    let mut sum = DVector::zeros(n);
    let mut total = 0.0;
    for (p, &w) in points.iter().zip(weights) {
        sum.axpy(w, p, 1.0);
        total += w;
    }
    sum / total
}

/// Weighted covariance about the weighted mean, normalized by total weight.
///
/// Computed as a Gram product of the sqrt-weight-scaled centered matrix so
/// the result is symmetric PSD up to rounding.
pub fn weighted_covariance(
    points: &[DVector<f64>],
    weights: &[f64],
    mean: &DVector<f64>,
) -> DMatrix<f64> {
    let n = points[0].len();
    let m = points.len();
    let total: f64 = weights.iter().sum();
    let mut centered = DMatrix::zeros(n, m);
    for (i, (p, &w)) in points.iter().zip(weights).enumerate() {
        let s = (w / total).sqrt();
        for j in 0..n {
            centered[(j, i)] = s * (p[j] - mean[j]);
        }
    }
    &centered * centered.transpose()
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted
/// descending. Returns (eigenvalues, eigenvectors as columns).
pub fn sorted_symmetric_eigen(matrix: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = matrix.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Squared Mahalanobis distance computed through a Cholesky factor,
/// never an explicit inverse: ||L^-1 (x - mu)||^2.
pub fn mahalanobis_sq(
    x: &DVector<f64>,
    mu: &DVector<f64>,
    chol: &nalgebra::Cholesky<f64, nalgebra::Dyn>,
) -> f64 {
    let d = x - mu;
    let y = chol.l_dirty().solve_lower_triangular(&d).expect("factor is invertible");
    y.norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_rank_convention() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_type1(&v, 0.5), 2.0);
        assert_eq!(quantile_type1(&v, 0.51), 3.0);
        assert_eq!(quantile_type1(&v, 1.0), 4.0);
        assert_eq!(median(&[1.0, 2.0, 100.0]), 2.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 100.0]), 2.5);
    }

    #[test]
    fn weighted_moments_match_plain_on_unit_weights() {
        let pts = vec![
            DVector::from_vec(vec![1.0, 0.0]),
            DVector::from_vec(vec![-1.0, 0.0]),
            DVector::from_vec(vec![0.0, 2.0]),
            DVector::from_vec(vec![0.0, -2.0]),
        ];
        let w = vec![1.0; 4];
        let mean = weighted_mean(&pts, &w);
        assert!(mean.norm() < 1e-12);
        let cov = weighted_covariance(&pts, &w, &mean);
        assert!((cov[(0, 0)] - 0.5).abs() < 1e-12);
        assert!((cov[(1, 1)] - 2.0).abs() < 1e-12);
        assert!(cov[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn eigen_sorted_descending() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let (vals, vecs) = sorted_symmetric_eigen(&m);
        assert!((vals[0] - 4.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!(vecs.column(0)[1].abs() > 0.99);
    }
}
