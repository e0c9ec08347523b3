//! Seeded generation of noisy two-component Gaussian mixture datasets.
//!
//! One master seed drives four fixed ChaCha substreams (allocation, G1,
//! G2, noise), so swapping the noise model leaves the Gaussian draws
//! untouched and paired comparisons across noise models stay paired.

use nalgebra::{Cholesky, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Label, MixtureModel};

const STREAM_ALLOCATION: u64 = 0;
const STREAM_G1: u64 = 1;
const STREAM_G2: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Distribution of the adversarial points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseModel {
    /// I.i.d. standard Cauchy per coordinate, shifted and scaled.
    Cauchy {
        scale: f64,
        location: Option<Vec<f64>>,
    },
    /// Every noise point equals the given point.
    PointMass { point: Vec<f64> },
    /// Noise points supplied by the caller, consumed in order.
    External { points: Vec<Vec<f64>> },
}

impl NoiseModel {
    pub fn standard_cauchy() -> Self {
        NoiseModel::Cauchy {
            scale: 1.0,
            location: None,
        }
    }

    pub fn point_mass(point: Vec<f64>) -> Self {
        NoiseModel::PointMass { point }
    }
}

/// How label counts are assigned to the m points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Allocation {
    /// Each point draws its component independently with probabilities w.
    Multinomial,
    /// Deterministic counts round(m*w_i), fixed up by largest remainder.
    ExactCounts,
}

#[derive(Debug, Clone)]
pub struct GenerationConfig {
    pub model: MixtureModel,
    pub m: usize,
    pub noise: NoiseModel,
    pub seed: u64,
    pub allocation: Allocation,
}

/// Largest-remainder rounding of m*w to integer counts summing to m.
pub fn exact_counts(m: usize, weights: &[f64; 3]) -> [usize; 3] {
    let raw: Vec<f64> = weights.iter().map(|w| w * m as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| {
        let ra = raw[a] - raw[a].floor();
        let rb = raw[b] - raw[b].floor();
        rb.partial_cmp(&ra).unwrap()
    });
    for i in 0..(m - assigned) {
        counts[order[i % 3]] += 1;
    }
    [counts[0], counts[1], counts[2]]
}

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `count` points with i.i.d. standard-Cauchy coordinates, scaled
/// and shifted.
pub fn sample_cauchy(
    n: usize,
    scale: f64,
    location: &DVector<f64>,
    count: usize,
    rng: &mut impl Rng,
) -> Vec<DVector<f64>> {
    let cauchy = Cauchy::new(0.0f64, 1.0).expect("valid standard Cauchy");
    (0..count)
        .map(|_| DVector::from_fn(n, |j, _| location[j] + scale * cauchy.sample(rng)))
        .collect()
}

fn gaussian_point(
    mu: &DVector<f64>,
    chol_l: &nalgebra::DMatrix<f64>,
    rng: &mut impl Rng,
) -> DVector<f64> {
    let z = DVector::from_fn(mu.len(), |_, _| rng.sample::<f64, _>(StandardNormal));
    mu + chol_l * z
}

/// Generates a fully labeled dataset from the config. Identical configs
/// (including seed) produce identical datasets.
pub fn generate(cfg: &GenerationConfig) -> Result<Dataset> {
    crate::model::validate_model(&cfg.model)?;
    let n = cfg.model.dim;
    if cfg.m == 0 {
        return Err(Error::InvalidConfig("m must be positive".into()));
    }
    match &cfg.noise {
        NoiseModel::PointMass { point } => {
            if point.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "point-mass noise has dimension {}, model has {}",
                    point.len(),
                    n
                )));
            }
        }
        NoiseModel::Cauchy { scale, location } => {
            if *scale <= 0.0 {
                return Err(Error::InvalidConfig("Cauchy scale must be positive".into()));
            }
            if let Some(loc) = location {
                if loc.len() != n {
                    return Err(Error::InvalidConfig(format!(
                        "Cauchy location has dimension {}, model has {}",
                        loc.len(),
                        n
                    )));
                }
            }
        }
        NoiseModel::External { points } => {
            for p in points {
                if p.len() != n {
                    return Err(Error::InvalidConfig(
                        "external noise point dimension mismatch".into(),
                    ));
                }
            }
        }
    }

    let weights = [cfg.model.w1, cfg.model.w2, cfg.model.w3];
    let mut alloc_rng = substream(cfg.seed, STREAM_ALLOCATION);
    let labels: Vec<Label> = match cfg.allocation {
        Allocation::Multinomial => (0..cfg.m)
            .map(|_| {
                let u: f64 = alloc_rng.gen();
                if u < weights[0] {
                    Label::G1
                } else if u < weights[0] + weights[1] {
                    Label::G2
                } else {
                    Label::Noise
                }
            })
            .collect(),
        Allocation::ExactCounts => {
            let counts = exact_counts(cfg.m, &weights);
            if counts.iter().any(|&c| c == 0) {
                return Err(Error::InvalidConfig(format!(
                    "exact counts require round(m*w_i) >= 1, got {counts:?}"
                )));
            }
            let mut labels = Vec::with_capacity(cfg.m);
            labels.extend(std::iter::repeat(Label::G1).take(counts[0]));
            labels.extend(std::iter::repeat(Label::G2).take(counts[1]));
            labels.extend(std::iter::repeat(Label::Noise).take(counts[2]));
            // Fisher-Yates so the sample order carries no label information.
            for i in (1..labels.len()).rev() {
                let j = alloc_rng.gen_range(0..=i);
                labels.swap(i, j);
            }
            labels
        }
    };

    let chol = Cholesky::new(cfg.model.sigma.clone())
        .ok_or(Error::NonPositiveDefiniteCovariance {
            reason: "Cholesky factorization failed".into(),
        })?;
    let l = chol.l();

    let mut g1_rng = substream(cfg.seed, STREAM_G1);
    let mut g2_rng = substream(cfg.seed, STREAM_G2);
    let mut noise_rng = substream(cfg.seed, STREAM_NOISE);
    let cauchy = Cauchy::new(0.0f64, 1.0).expect("valid standard Cauchy");

    let mut external_used = 0usize;
    let mut points = Vec::with_capacity(cfg.m);
    for label in &labels {
        let p = match label {
            Label::G1 => gaussian_point(&cfg.model.mu1, &l, &mut g1_rng),
            Label::G2 => gaussian_point(&cfg.model.mu2, &l, &mut g2_rng),
            Label::Noise => match &cfg.noise {
                NoiseModel::PointMass { point } => DVector::from_vec(point.clone()),
                NoiseModel::Cauchy { scale, location } => DVector::from_fn(n, |j, _| {
                    let loc = location.as_ref().map_or(0.0, |v| v[j]);
                    loc + scale * cauchy.sample(&mut noise_rng)
                }),
                NoiseModel::External { points: ext } => {
                    let p = ext.get(external_used).ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "external noise exhausted after {external_used} points"
                        ))
                    })?;
                    external_used += 1;
                    DVector::from_vec(p.clone())
                }
            },
        };
        points.push(p);
    }

    Dataset::new(points, Some(labels), Some(cfg.seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn figure_model() -> MixtureModel {
        MixtureModel::spherical(
            20.0 / 41.0,
            20.0 / 41.0,
            1.0 / 41.0,
            DVector::from_vec(vec![1.0, 2.0]),
            DVector::from_vec(vec![3.0, 5.0]),
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn exact_counts_reproduce_motivating_split() {
        let model = figure_model();
        let cfg = GenerationConfig {
            model,
            m: 41,
            noise: NoiseModel::point_mass(vec![6.0, 1.0]),
            seed: 7,
            allocation: Allocation::ExactCounts,
        };
        let ds = generate(&cfg).unwrap();
        assert_eq!(ds.len(), 41);
        let (m1, m2, m3) = ds.label_counts().unwrap();
        assert_eq!((m1, m2, m3), (20, 20, 1));
        let noise: Vec<_> = ds.points_with_label(Label::Noise);
        assert_eq!(noise.len(), 1);
        assert_eq!(noise[0], &DVector::from_vec(vec![6.0, 1.0]));
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = GenerationConfig {
            model: figure_model(),
            m: 200,
            noise: NoiseModel::standard_cauchy(),
            seed: 42,
            allocation: Allocation::Multinomial,
        };
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.labels, b.labels);
        for (p, q) in a.points.iter().zip(&b.points) {
            assert_eq!(p, q);
        }
    }

    #[test]
    fn gaussian_draws_independent_of_noise_model() {
        let mk = |noise| GenerationConfig {
            model: figure_model(),
            m: 300,
            noise,
            seed: 11,
            allocation: Allocation::Multinomial,
        };
        let a = generate(&mk(NoiseModel::standard_cauchy())).unwrap();
        let b = generate(&mk(NoiseModel::point_mass(vec![6.0, 1.0]))).unwrap();
        assert_eq!(a.labels, b.labels);
        for ((p, q), l) in a.points.iter().zip(&b.points).zip(a.labels.as_ref().unwrap()) {
            if *l != Label::Noise {
                assert_eq!(p, q, "Gaussian draw changed with the noise model");
            }
        }
    }

    #[test]
    fn exact_counts_largest_remainder() {
        // 10 * (0.55, 0.35, 0.10) = (5.5, 3.5, 1.0): one leftover unit goes
        // to the largest remainder.
        let c = exact_counts(10, &[0.55, 0.35, 0.10]);
        assert_eq!(c.iter().sum::<usize>(), 10);
        assert_eq!(c, [6, 3, 1]);
        let c = exact_counts(41, &[20.0 / 41.0, 20.0 / 41.0, 1.0 / 41.0]);
        assert_eq!(c, [20, 20, 1]);
    }

    #[test]
    fn exact_counts_rejects_vanishing_component() {
        let model = MixtureModel::spherical(
            0.97,
            0.02,
            0.01,
            DVector::zeros(2),
            DVector::from_vec(vec![5.0, 5.0]),
            1.0,
        )
        .unwrap();
        let cfg = GenerationConfig {
            model,
            m: 20,
            noise: NoiseModel::standard_cauchy(),
            seed: 1,
            allocation: Allocation::ExactCounts,
        };
        assert!(matches!(generate(&cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn cauchy_empty_draw() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let loc = DVector::zeros(3);
        assert!(sample_cauchy(3, 1.0, &loc, 0, &mut rng).is_empty());
    }

    #[test]
    fn correlated_covariance_respected() {
        // Whitening the G1 points by the true factor must give unit-ish
        // coordinate variances.
        let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.8, 0.8, 1.0]);
        let model = MixtureModel::new(
            0.8,
            0.16,
            0.04,
            DVector::zeros(2),
            DVector::from_vec(vec![50.0, 50.0]),
            sigma.clone(),
        )
        .unwrap();
        let cfg = GenerationConfig {
            model,
            m: 20_000,
            noise: NoiseModel::point_mass(vec![0.0, 0.0]),
            seed: 3,
            allocation: Allocation::Multinomial,
        };
        let ds = generate(&cfg).unwrap();
        let g1 = ds.points_with_label(Label::G1);
        let m1 = g1.len() as f64;
        let l_inv = Cholesky::new(sigma).unwrap().l().try_inverse().unwrap();
        let whitened: Vec<DVector<f64>> = g1.iter().map(|p| &l_inv * *p).collect();
        for j in 0..2 {
            let mean: f64 = whitened.iter().map(|p| p[j]).sum::<f64>() / m1;
            let var: f64 = whitened.iter().map(|p| (p[j] - mean).powi(2)).sum::<f64>() / m1;
            assert!(mean.abs() < 4.0 / m1.sqrt(), "mean {mean}");
            assert!((var - 1.0).abs() < 8.0 / m1.sqrt(), "var {var}");
        }
    }
}
