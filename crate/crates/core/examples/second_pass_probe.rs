// Scratch: decompose the 41-point second-pass error.
use nalgebra::{DMatrix, DVector};
use rgmm::agnostic::{agnostic_cov, agnostic_mean, AgnosticConfig, Branch};
use rgmm::alg1::{filter_cutoff, mahalanobis_scores, Alg1Config};
use rgmm::model::{Label, MixtureModel};
use rgmm::synth::{generate, Allocation, GenerationConfig, NoiseModel};

fn main() {
    let w1 = 20.0 / 41.0;
    let model = MixtureModel::spherical(
        w1,
        w1,
        1.0 / 41.0,
        DVector::from_vec(vec![1.0, 2.0]),
        DVector::from_vec(vec![3.0, 5.0]),
        1.0,
    )
    .unwrap();
    let cfg = Alg1Config::new(w1);
    let mut sums = [0.0f64; 4];
    for seed in 0..20u64 {
        let gcfg = GenerationConfig {
            model: model.clone(),
            m: 41,
            noise: NoiseModel::point_mass(vec![6.0, 1.0]),
            seed: 11_000 + seed,
            allocation: Allocation::ExactCounts,
        };
        let ds = generate(&gcfg).unwrap();
        let first = cfg.first_pass_config();
        let mu1 = agnostic_mean(&ds.points, &first).unwrap();
        let sigma = agnostic_cov(&ds.points, 1.0 - w1, &cfg.agnostic).unwrap();

        // Which true mean did the first pass capture?
        let (captured, other_mean, other_label) =
            if (mu1.clone() - &model.mu1).norm() <= (mu1.clone() - &model.mu2).norm() {
                (Label::G1, model.mu2.clone(), Label::G2)
            } else {
                (Label::G2, model.mu1.clone(), Label::G1)
            };
        let e1 = (mu1.clone()
            - if captured == Label::G1 {
                &model.mu1
            } else {
                &model.mu2
            })
        .norm();

        let scores = mahalanobis_scores(&ds.points, &mu1, &sigma).unwrap();
        let cutoff = filter_cutoff(&scores, w1);
        let labels = ds.labels.as_ref().unwrap();
        let filtered: Vec<DVector<f64>> = ds
            .points
            .iter()
            .zip(scores.iter())
            .filter(|(_, &s)| s >= cutoff)
            .map(|(p, _)| p.clone())
            .collect();
        let other_in_xp = ds
            .points
            .iter()
            .zip(scores.iter())
            .zip(labels.iter())
            .filter(|((_, &s), &l)| s >= cutoff && l == other_label)
            .count();
        let total_other = labels.iter().filter(|&&l| l == other_label).count();

        let mu2 = agnostic_mean(&filtered, &cfg.agnostic).unwrap();
        let e2 = (mu2.clone() - &other_mean).norm();

        // Oracle: mean of the other component's points inside X'.
        let oracle: DVector<f64> = {
            let pts: Vec<&DVector<f64>> = ds
                .points
                .iter()
                .zip(scores.iter())
                .zip(labels.iter())
                .filter(|((_, &s), &l)| s >= cutoff && l == other_label)
                .map(|((p, _), _)| p)
                .collect();
            pts.iter().fold(DVector::zeros(2), |a, p| a + *p) / pts.len() as f64
        };
        let sig_eigs = sigma.clone().symmetric_eigen().eigenvalues;
        let cond = sig_eigs.max() / sig_eigs.min();
        println!(
            "seed {seed}: e1={e1:.2} e2={e2:.2} | X' other {}({}/{}), mu2-vs-oracle={:.2}, oracle-vs-truth={:.2}, cond(S)={cond:.1}",
            other_in_xp,
            other_in_xp,
            total_other,
            (mu2.clone() - &oracle).norm(),
            (oracle.clone() - &other_mean).norm(),
        );
        sums[0] += e1;
        sums[1] += e2;
        sums[2] += (mu2 - &oracle).norm();
        sums[3] += cond;
    }
    println!(
        "means: e1={:.3} e2={:.3} mu2-vs-oracle={:.3} cond={:.1}",
        sums[0] / 20.0,
        sums[1] / 20.0,
        sums[2] / 20.0,
        sums[3] / 20.0
    );
    let _ = (AgnosticConfig::default(), Branch::Gaussian, DMatrix::<f64>::identity(2, 2));
}
