use std::f64::consts::PI;

use packet_purity::oracle::{mc, mc_overlap_i2_i3, mc_stream, McEstimate};
use packet_purity::{CollisionConfig, PhaseShiftModel};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// `int exp(-a |x|^2 / 2) d^3x = (2 pi / a)^(3/2)`, sampled from a standard
/// normal proposal.
fn gaussian_test(seed: u64, n: u64, a: f64) -> McEstimate {
    let log_norm = -1.5 * (2.0 * PI).ln();
    mc::estimate(seed, 0, n, |rng| {
        let x: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Ok((-0.5 * a * r2).exp() / (log_norm - 0.5 * r2).exp())
    })
    .unwrap()
}

#[test]
fn estimator_is_unbiased_on_gaussian_integrand() {
    let a = 1.7;
    let exact = (2.0 * PI / a).powf(1.5);
    let hits = (0..30)
        .filter(|&seed| gaussian_test(seed, 20_000, a).z_score(exact).abs() < 3.0)
        .count();
    assert!(hits >= 28, "{hits} of 30");
}

#[test]
fn stderr_scales_as_inverse_root_n() {
    let a = 1.7;
    for seed in [1, 2, 3] {
        let small = gaussian_test(seed, 50_000, a);
        let large = gaussian_test(seed + 100, 100_000, a);
        let ratio = small.stderr / large.stderr;
        assert!((1.25..=1.6).contains(&ratio), "ratio {ratio}");
        assert_eq!(large.n_samples, 100_000);
    }
}

#[test]
fn paired_streams_are_uncorrelated() {
    let n = 100_000;
    let mut a = mc_stream(42, 0);
    let mut b = mc_stream(42, 1);
    let xs: Vec<f64> = (0..n).map(|_| a.random::<f64>()).collect();
    let ys: Vec<f64> = (0..n).map(|_| b.random::<f64>()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n as f64, ys.iter().sum::<f64>() / n as f64);
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let vx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let vy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let r = cov / (vx * vy).sqrt();
    assert!(r.abs() < 0.01, "r = {r}");
}

#[test]
fn same_seed_same_estimate() {
    let a = gaussian_test(5, 30_000, 1.7);
    let b = gaussian_test(5, 30_000, 1.7);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    assert_ne!(a.mean, gaussian_test(6, 30_000, 1.7).mean);
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = CollisionConfig::new(0.01, 1.0, 10.0, 0.0).unwrap();
    let m = PhaseShiftModel::hard_sphere(1.0).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| mc_overlap_i2_i3(&cfg, &m, 100_000, 42).unwrap())
    };
    let (a2, a3) = run(1);
    for threads in [2, 4] {
        let (b2, b3) = run(threads);
        assert_eq!(a2.mean.to_bits(), b2.mean.to_bits());
        assert_eq!(a2.stderr.to_bits(), b2.stderr.to_bits());
        assert_eq!(a3.mean.to_bits(), b3.mean.to_bits());
        assert_eq!(a3.stderr.to_bits(), b3.stderr.to_bits());
    }
}

#[test]
fn too_few_samples_rejected() {
    assert!(mc::estimate(1, 0, 1, |_| Ok(1.0)).is_err());
}
