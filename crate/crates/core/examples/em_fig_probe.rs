// Scratch: EM per-seed behavior on the 41-point motivating scenario.
use nalgebra::DVector;
use rgmm::em::{estimate_em, EmConfig};
use rgmm::model::{estimation_error, MixtureModel};
use rgmm::synth::{generate, Allocation, GenerationConfig, NoiseModel};

fn main() {
    let model = MixtureModel::spherical(
        20.0 / 41.0,
        20.0 / 41.0,
        1.0 / 41.0,
        DVector::from_vec(vec![1.0, 2.0]),
        DVector::from_vec(vec![3.0, 5.0]),
        1.0,
    )
    .unwrap();
    for (label, reg, iters) in [("default", 1e-6, 1000), ("stock", 0.0, 100)] {
        let mut errs = Vec::new();
        for seed in 0..20u64 {
            let gcfg = GenerationConfig {
                model: model.clone(),
                m: 41,
                noise: NoiseModel::point_mass(vec![6.0, 1.0]),
                seed: 11_000 + seed,
                allocation: Allocation::ExactCounts,
            };
            let ds = generate(&gcfg).unwrap();
            let cfg = EmConfig {
                seed: 12_000 + seed,
                reg,
                max_iters: iters,
                ..EmConfig::default()
            };
            match estimate_em(&ds.points, &cfg) {
                Ok(est) => {
                    let e = estimation_error(&est, &model).unwrap();
                    errs.push(e);
                    if seed < 8 {
                        println!(
                            "{label} seed {seed}: err={e:.2} iters={} mu1=({:.1},{:.1}) mu2=({:.1},{:.1}) w=({:.2},{:.2})",
                            est.diagnostics["em_iterations"],
                            est.mu1_hat[0], est.mu1_hat[1],
                            est.mu2_hat[0], est.mu2_hat[1],
                            est.diagnostics["em_weight_1"], est.diagnostics["em_weight_2"],
                        );
                    }
                }
                Err(e) => {
                    errs.push(f64::INFINITY);
                    if seed < 8 {
                        println!("{label} seed {seed}: ERROR {e}");
                    }
                }
            }
        }
        let finite: Vec<f64> = errs.iter().cloned().filter(|v| v.is_finite()).collect();
        let mean = finite.iter().sum::<f64>() / finite.len() as f64;
        println!("{label}: mean finite err {mean:.2}, failures {}", errs.len() - finite.len());
    }
}
