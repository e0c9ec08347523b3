// Scratch probe: config variants on the balanced motivating scenario.
use nalgebra::DVector;
use rgmm::agnostic::{AgnosticConfig, Branch};
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

fn run_variant(name: &str, cfg_of: &dyn Fn(f64) -> Alg1Config) {
    let w1 = 20.0 / 41.0;
    let mut med = Vec::new();
    let mut wins = 0;
    let mut split1 = Vec::new();
    for seed in 0..20u64 {
        let gcfg = GenerationConfig {
            model: figure_model(),
            m: 41,
            noise: NoiseModel::point_mass(vec![6.0, 1.0]),
            seed: 1000 + seed,
            allocation: Allocation::ExactCounts,
        };
        let ds = generate(&gcfg).unwrap();
        let a = estimate_alg1(&ds.points, &cfg_of(w1)).unwrap();
        let ea = estimation_error(&a, &gcfg.model).unwrap();
        let (e1, e2) = estimation_error_split(&a, &gcfg.model).unwrap();
        split1.push((e1, e2));
        let em = estimate_em(
            &ds.points,
            &EmConfig {
                seed: 2000 + seed,
                ..EmConfig::default()
            },
        );
        let ee = match em {
            Ok(e) => estimation_error(&e, &gcfg.model).unwrap(),
            Err(_) => f64::INFINITY,
        };
        if ee > ea {
            wins += 1;
        }
        med.push(ea);
    }
    med.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m1: f64 = split1.iter().map(|x| x.0).sum::<f64>() / 20.0;
    let m2: f64 = split1.iter().map(|x| x.1).sum::<f64>() / 20.0;
    println!(
        "{name}: median={:.3} p90={:.3} wins={wins}/20 mean_e1={m1:.3} mean_e2={m2:.3}",
        0.5 * (med[9] + med[10]),
        med[17]
    );
}

fn main() {
    run_variant("A base (Gen/Gen, eps=.01, eta2=.25(1-w1))", &Alg1Config::new);
    run_variant("B eps=0.05", &|w1| {
        let mut c = Alg1Config::new(w1);
        c.agnostic.epsilon = 0.05;
        c
    });
    run_variant("C eta2=0.5(1-w1)", &|w1| {
        let mut c = Alg1Config::new(w1);
        c.agnostic.eta = 0.5 * (1.0 - w1);
        c
    });
    run_variant("D second pass Gaussian", &|w1| {
        let mut c = Alg1Config::new(w1);
        c.agnostic.branch = Branch::Gaussian;
        c
    });
    run_variant("E eps=0.1", &|w1| {
        let mut c = Alg1Config::new(w1);
        c.agnostic.epsilon = 0.1;
        c
    });
    run_variant("F eta2=0.5(1-w1)+GaussianSecond", &|w1| {
        let mut c = Alg1Config::new(w1);
        c.agnostic.eta = 0.5 * (1.0 - w1);
        c.agnostic.branch = Branch::Gaussian;
        c
    });

    // Also: how does each variant do on imbalanced desk-scale data (sanity)?
    let w = (0.8, 0.16, 0.04);
    let n = 10;
    let rhs = 2.0 * ((n as f64) * (w.0 / w.1 as f64).ln()).sqrt()
        + 2.0 * ((n - 1) as f64).sqrt()
        + 2.0 * (w.0 / w.1 as f64).ln();
    let dist = (4.0 * rhs).sqrt();
    let model = MixtureModel::spherical(
        w.0,
        w.1,
        w.2,
        DVector::zeros(n),
        DVector::from_element(n, dist / (n as f64).sqrt()),
        1.0,
    )
    .unwrap();
    for (name, cfg) in [
        ("A", Alg1Config::new(0.8)),
        ("C", {
            let mut c = Alg1Config::new(0.8);
            c.agnostic.eta = 0.5 * (1.0 - 0.8);
            c
        }),
        ("D", {
            let mut c = Alg1Config::new(0.8);
            c.agnostic.branch = Branch::Gaussian;
            c
        }),
    ] {
        let mut errs = Vec::new();
        for seed in 0..5u64 {
            let gcfg = GenerationConfig {
                model: model.clone(),
                m: 2000,
                noise: NoiseModel::standard_cauchy(),
                seed: 7000 + seed,
                allocation: Allocation::Multinomial,
            };
            let ds = generate(&gcfg).unwrap();
            let est = estimate_alg1(&ds.points, &cfg).unwrap();
            let (e1, e2) = estimation_error_split(&est, &model).unwrap();
            errs.push((e1, e2));
        }
        let m1: f64 = errs.iter().map(|x| x.0).sum::<f64>() / 5.0;
        let m2: f64 = errs.iter().map(|x| x.1).sum::<f64>() / 5.0;
        println!("imbalanced n=10 Cauchy variant {name}: mean_e1={m1:.3} mean_e2={m2:.3}");
    }
    let _ = AgnosticConfig::default();
}
