// Scratch probe: knob grid for defaults and criteria 2/3 dry-run.
use nalgebra::DVector;
use rgmm::alg1::{estimate_alg1, Alg1Config};
use rgmm::em::{estimate_em, EmConfig};
use rgmm::model::{estimation_error, estimation_error_split, MixtureModel};
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

fn bench_model(n: usize) -> MixtureModel {
    let (w1, w2, w3) = (0.8, 0.16, 0.04);
    let rhs = 2.0 * ((n as f64) * (w1 / w2 as f64).ln()).sqrt()
        + 2.0 * ((n - 1) as f64).sqrt()
        + 2.0 * (w1 / w2 as f64).ln();
    let dist = (4.0 * rhs).sqrt();
    MixtureModel::spherical(
        w1,
        w2,
        w3,
        DVector::zeros(n),
        DVector::from_element(n, dist / (n as f64).sqrt()),
        1.0,
    )
    .unwrap()
}

fn mk_cfg(w1: f64, eps: f64, eta2_factor: f64) -> Alg1Config {
    let mut c = Alg1Config::new(w1);
    c.agnostic.epsilon = eps;
    c.agnostic.eta = eta2_factor * (1.0 - w1);
    c
}

fn main() {
    println!("== criterion 1 grid ==");
    for (eps, f2) in [(0.01, 0.25), (0.01, 0.5), (0.01, 0.75)] {
        for base in [1000u64, 11000, 21000, 31000, 41000] {
            let mut wins = 0;
            let mut errs = Vec::new();
            for seed in 0..20u64 {
                let gcfg = GenerationConfig {
                    model: figure_model(),
                    m: 41,
                    noise: NoiseModel::point_mass(vec![6.0, 1.0]),
                    seed: base + seed,
                    allocation: Allocation::ExactCounts,
                };
                let ds = generate(&gcfg).unwrap();
                let est = estimate_alg1(&ds.points, &mk_cfg(20.0 / 41.0, eps, f2)).unwrap();
                let ea = estimation_error(&est, &gcfg.model).unwrap();
                let ee = estimate_em(
                    &ds.points,
                    &EmConfig {
                        seed: base + 1000 + seed,
                        reg: 0.0,
                        max_iters: 100,
                        ..EmConfig::default()
                    },
                )
                .map(|e| estimation_error(&e, &gcfg.model).unwrap())
                .unwrap_or(f64::INFINITY);
                if ee > ea {
                    wins += 1;
                }
                errs.push(ea);
            }
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            print!(
                " eps={eps} f2={f2} base={base}: med={:.2} wins={wins} |",
                0.5 * (errs[9] + errs[10])
            );
        }
        println!();
    }

    println!("== criterion 2 dry-run (n=10, m=2000, reps=5) ==");
    for (eps, f2) in [(0.01, 0.5), (0.05, 0.5), (0.05, 0.25)] {
        let model = bench_model(10);
        let mut alg1_tot = Vec::new();
        let mut em_tot = Vec::new();
        let mut alg1_e2 = Vec::new();
        let mut em_e2 = Vec::new();
        for seed in 0..5u64 {
            let gcfg = GenerationConfig {
                model: model.clone(),
                m: 2000,
                noise: NoiseModel::standard_cauchy(),
                seed: 40_000 + seed,
                allocation: Allocation::Multinomial,
            };
            let ds = generate(&gcfg).unwrap();
            let a = estimate_alg1(&ds.points, &mk_cfg(0.8, eps, f2)).unwrap();
            let (a1, a2) = estimation_error_split(&a, &model).unwrap();
            alg1_tot.push(a1 + a2);
            alg1_e2.push(a2);
            let e = estimate_em(
                &ds.points,
                &EmConfig {
                    seed: 50_000 + seed,
                    ..EmConfig::default()
                },
            )
            .map(|e| estimation_error_split(&e, &model).unwrap())
            .unwrap_or((f64::NAN, f64::NAN));
            em_tot.push(e.0 + e.1);
            em_e2.push(e.1);
        }
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let std = |v: &[f64]| {
            let m = mean(v);
            (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
        };
        println!(
            " eps={eps} f2={f2}: alg1 tot {:.2} em tot {:.2} | std e2: alg1 {:.2} em {:.2}",
            mean(&alg1_tot),
            mean(&em_tot),
            std(&alg1_e2),
            std(&em_e2)
        );
    }

    println!("== criterion 3 dry-run (alpha sweep, n=10, m=2000, reps=5) ==");
    for (eps, f2) in [(0.05, 0.5), (0.05, 0.25)] {
        let model = bench_model(10);
        print!(" eps={eps} f2={f2}:");
        for alpha in [0.5, 0.67, 0.83, 1.0, 1.17, 1.33, 1.5] {
            let w1p = 1.0 - alpha * (1.0 - 0.8);
            let mut tot = 0.0;
            for seed in 0..5u64 {
                let gcfg = GenerationConfig {
                    model: model.clone(),
                    m: 2000,
                    noise: NoiseModel::standard_cauchy(),
                    seed: 60_000 + seed,
                    allocation: Allocation::Multinomial,
                };
                let ds = generate(&gcfg).unwrap();
                let a = estimate_alg1(&ds.points, &mk_cfg(w1p, eps, f2)).unwrap();
                tot += estimation_error(&a, &model).unwrap();
            }
            print!(" a{alpha}={:.2}", tot / 5.0);
        }
        println!();
    }
}
