// Scratch: runtime ceiling check at n=20, m=10^4.
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rgmm::alg1::{estimate_alg1, Alg1Config};

fn main() {
    let n = 20;
    let m = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mu2 = DVector::from_element(n, 9.65 / (n as f64).sqrt());
    let pts: Vec<DVector<f64>> = (0..m)
        .map(|i| {
            let mu = if i % 5 == 0 { &mu2 } else { &DVector::zeros(n) };
            DVector::from_fn(n, |j, _| mu[j] + rng.sample::<f64, _>(StandardNormal))
        })
        .collect();
    let t = std::time::Instant::now();
    let est = estimate_alg1(&pts, &Alg1Config::new(0.8)).unwrap();
    println!("n=20 m=10^4 alg1: {:?}  |X'|={}", t.elapsed(), est.diagnostics["filtered_count"]);
}
