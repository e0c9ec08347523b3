// Scratch probe for the acceptance-critical regimes; not part of the
// shipped API surface.
use nalgebra::DVector;
use rgmm::agnostic::{agnostic_cov, agnostic_mean, AgnosticConfig, Branch};
use rgmm::alg1::{estimate_alg1, filter_top, mahalanobis_scores, Alg1Config};
use rgmm::em::{estimate_em, EmConfig};
use rgmm::model::{estimation_error, Label, MixtureModel};
use rgmm::synth::{generate, Allocation, GenerationConfig, NoiseModel};

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

fn main() {
    let t0 = std::time::Instant::now();
    // ---- criterion 1: figure scenario, m = 41 ----
    let mut alg1_errs = Vec::new();
    let mut em_wins = 0;
    for seed in 0..20u64 {
        let cfg = GenerationConfig {
            model: figure_model(),
            m: 41,
            noise: NoiseModel::point_mass(vec![6.0, 1.0]),
            seed: 1000 + seed,
            allocation: Allocation::ExactCounts,
        };
        let ds = generate(&cfg).unwrap();
        let a = estimate_alg1(&ds.points, &Alg1Config::new(20.0 / 41.0)).unwrap();
        let ea = estimation_error(&a, &cfg.model).unwrap();
        let em = estimate_em(
            &ds.points,
            &EmConfig {
                seed: 2000 + seed,
                ..EmConfig::default()
            },
        );
        let ee = match em {
            Ok(e) => estimation_error(&e, &cfg.model).unwrap(),
            Err(_) => f64::INFINITY,
        };
        if ee > ea {
            em_wins += 1;
        }
        alg1_errs.push((ea, ee));
    }
    let mut sorted: Vec<f64> = alg1_errs.iter().map(|x| x.0).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!(
        "criterion 1: alg1 median={:.3} (min={:.3} max={:.3}), em worse in {}/20, elapsed {:?}",
        0.5 * (sorted[9] + sorted[10]),
        sorted[0],
        sorted[19],
        em_wins,
        t0.elapsed()
    );
    for (i, (a, e)) in alg1_errs.iter().enumerate() {
        if i < 6 {
            println!("  seed {i}: alg1={a:.3} em={e:.3}");
        }
    }

    // ---- criterion 6: scaled figure regime, purity ----
    let mut ok = 0;
    for seed in 0..20u64 {
        let model = figure_model();
        let cfg = GenerationConfig {
            model: model.clone(),
            m: 4100,
            noise: NoiseModel::point_mass(vec![6.0, 1.0]),
            seed: 3000 + seed,
            allocation: Allocation::ExactCounts,
        };
        let ds = generate(&cfg).unwrap();
        let acfg = Alg1Config::new(20.0 / 41.0);
        let first = acfg.first_pass_config();
        let mu1 = agnostic_mean(&ds.points, &first).unwrap();
        let sigma = agnostic_cov(&ds.points, 1.0 - 20.0 / 41.0, &acfg.agnostic).unwrap();
        let scores = mahalanobis_scores(&ds.points, &mu1, &sigma).unwrap();
        // captured component = nearer true mean
        let captured = if (mu1.clone() - &model.mu1).norm() <= (mu1.clone() - &model.mu2).norm() {
            Label::G1
        } else {
            Label::G2
        };
        let cutoff = rgmm::alg1::filter_cutoff(&scores, 20.0 / 41.0);
        let labels = ds.labels.as_ref().unwrap();
        let mut kept = 0usize;
        let mut kept_captured = 0usize;
        for (i, &s) in scores.iter().enumerate() {
            if s >= cutoff {
                kept += 1;
                if labels[i] == captured {
                    kept_captured += 1;
                }
            }
        }
        let frac = kept_captured as f64 / kept as f64;
        if frac < 0.15 {
            ok += 1;
        }
        if seed < 6 {
            println!(
                "  seed {seed}: captured={captured:?} |X'|={kept} frac={frac:.3} mu1=({:.2},{:.2})",
                mu1[0], mu1[1]
            );
        }
    }
    println!("criterion 6: purity ok in {ok}/20");

    // ---- criterion 4: Lemma 3.2 regime ----
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;
    let n = 10;
    let mut pass = 0;
    let bound = 5.0 * (0.05 + 0.1) * (10.0f64).ln().sqrt();
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + seed);
        let mu = DVector::from_element(n, 1.0);
        let m = 10_000;
        let corrupt = (0.05 * m as f64) as usize;
        let mut pts: Vec<DVector<f64>> = (0..m - corrupt)
            .map(|_| DVector::from_fn(n, |j, _| mu[j] + rng.sample::<f64, _>(StandardNormal)))
            .collect();
        let mut spike = mu.clone();
        spike[0] += 100.0;
        for _ in 0..corrupt {
            pts.push(spike.clone());
        }
        let cfg = AgnosticConfig {
            branch: Branch::Gaussian,
            ..AgnosticConfig::default()
        };
        let est = agnostic_mean(&pts, &cfg).unwrap();
        let err = (est - &mu).norm();
        worst = worst.max(err);
        if err <= bound {
            pass += 1;
        }
    }
    println!("criterion 4: {pass}/20 within {bound:.3}, worst {worst:.3}");

    // clean case
    let mut rng = ChaCha8Rng::seed_from_u64(4100);
    let mu = DVector::from_element(n, 1.0);
    let pts: Vec<DVector<f64>> = (0..10_000)
        .map(|_| DVector::from_fn(n, |j, _| mu[j] + rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let cfg = AgnosticConfig {
        branch: Branch::Gaussian,
        ..AgnosticConfig::default()
    };
    let est = agnostic_mean(&pts, &cfg).unwrap();
    println!(
        "criterion 4 clean: err={:.4} bound={:.4}",
        (est - &mu).norm(),
        0.1 * (10.0f64).ln().sqrt()
    );

    // ---- criterion 5: Lemma 3.3 clean regime ----
    let mut rng = ChaCha8Rng::seed_from_u64(4200);
    let m = 20_000;
    let pts: Vec<DVector<f64>> = (0..m)
        .map(|_| DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let t1 = std::time::Instant::now();
    let sigma = agnostic_cov(&pts, 0.0, &AgnosticConfig::default()).unwrap();
    let id = nalgebra::DMatrix::<f64>::identity(n, n);
    let err_id = (&sigma - &id).norm();
    // sample covariance oracle
    let mean = pts.iter().fold(DVector::zeros(n), |a, p| a + p) / m as f64;
    let mut sample = nalgebra::DMatrix::zeros(n, n);
    for p in &pts {
        let d = p - &mean;
        sample += &d * d.transpose();
    }
    sample /= (m - 1) as f64;
    println!(
        "criterion 5: ||S-I||_F={:.4} ||S-Ssample||_F={:.4} ({:?})",
        err_id,
        (&sigma - &sample).norm(),
        t1.elapsed()
    );

    // corrupted Lemma 3.3 regime (module invariant)
    let mut rng = ChaCha8Rng::seed_from_u64(4300);
    let m = 10_000;
    let corrupt = 500;
    let mut pts: Vec<DVector<f64>> = (0..m - corrupt)
        .map(|_| DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let mut spike = DVector::zeros(n);
    spike[0] = 100.0;
    for _ in 0..corrupt {
        pts.push(spike.clone());
    }
    // interleave corrupted points so pairing mixes them
    for i in (1..pts.len()).rev() {
        let j = rng.gen_range(0..=i);
        pts.swap(i, j);
    }
    let sigma = agnostic_cov(&pts, 0.05, &AgnosticConfig::default()).unwrap();
    let err = (&sigma - &id).norm();
    let b33 = 5.0 * ((0.05f64).sqrt() + (0.15f64).powf(0.75)) * (10.0f64).ln().sqrt();
    println!("lemma 3.3 corrupted: err={err:.4} bound={b33:.4}");

    // ---- degenerate single-gaussian w1=0.5 (module example) ----
    let mut rng = ChaCha8Rng::seed_from_u64(4400);
    let mu = DVector::from_element(10, 2.0);
    let pts: Vec<DVector<f64>> = (0..10_000)
        .map(|_| DVector::from_fn(10, |j, _| mu[j] + rng.sample::<f64, _>(StandardNormal)))
        .collect();
    let cfg = Alg1Config::new(0.5);
    let est = estimate_alg1(&pts, &cfg).unwrap();
    println!(
        "degenerate: mu1 err={:.3} mu2 err={:.3}",
        (est.mu1_hat.clone() - &mu).norm(),
        (est.mu2_hat.clone() - &mu).norm()
    );
    let _ = filter_top;
    println!("total elapsed {:?}", t0.elapsed());
}
