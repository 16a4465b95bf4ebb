use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use tankstat::miss_probability::{q_expectation, q_variance};
use tankstat::sim::{
    build_layout, draw_sample, run_mse, trial_rng, EstimatorKind, FactoryLayout, SimulationConfig,
};

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn sampler_is_uniform_over_subsets() {
    let layout = build_layout(vec![3, 2, 3], vec![2, 5], 4).unwrap();
    let draws = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for k in 1..=8u64 {
        let cells = binomial(8, k);
        let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
        for _ in 0..draws {
            let s = draw_sample(&layout, k, &mut rng).unwrap();
            *counts.entry(s.serials().to_vec()).or_default() += 1;
        }
        assert_eq!(
            counts.len() as u64,
            cells,
            "k = {k}: not every subset was drawn"
        );
        if cells == 1 {
            continue;
        }
        let expected = draws as f64 / cells as f64;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        let p = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
        assert!(
            p > 1e-3,
            "k = {k}: chi-square {stat:.2} on {} dof, p = {p:.2e}",
            cells - 1
        );
    }
}

fn mfp_config(trials: u64) -> SimulationConfig {
    let layout = FactoryLayout::uniform(5, 100, 900).unwrap();
    SimulationConfig::new(
        "mfp",
        layout,
        EstimatorKind::Mfp,
        vec![10, 20, 30],
        trials,
        2024,
    )
    .unwrap()
}

#[test]
fn thread_count_does_not_change_results() {
    let cfg = mfp_config(2000);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_mse(&cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    for (a, b) in one.rows.iter().zip(&four.rows) {
        assert_eq!(a.mse.to_bits(), b.mse.to_bits());
        assert_eq!(a.mean_estimate.to_bits(), b.mean_estimate.to_bits());
    }
}

#[test]
fn mse_dominates_squared_bias() {
    let layouts = [
        (FactoryLayout::single(60).unwrap(), EstimatorKind::Gtp),
        (
            build_layout(vec![60], vec![], 40).unwrap(),
            EstimatorKind::GtpUm,
        ),
        (
            FactoryLayout::uniform(4, 30, 70).unwrap(),
            EstimatorKind::MfpMinUnknown,
        ),
        (
            FactoryLayout::uniform(4, 30, 70).unwrap(),
            EstimatorKind::FixedGap,
        ),
        (
            FactoryLayout::uniform(4, 30, 70).unwrap(),
            EstimatorKind::FixedGapK1,
        ),
    ];
    for (layout, est) in layouts {
        let cfg = SimulationConfig::new("b", layout, est, vec![6, 10, 16], 3000, 5).unwrap();
        for row in run_mse(&cfg).unwrap().rows {
            assert!(row.mse >= row.bias * row.bias - 1e-9, "{est:?} {row:?}");
        }
    }
}

#[test]
fn gtp_mse_matches_variance_formula() {
    let (n, k, trials) = (100u64, 10u64, 100_000u64);
    let layout = FactoryLayout::single(n).unwrap();
    let cfg = SimulationConfig::new(
        "gtp",
        layout.clone(),
        EstimatorKind::Gtp,
        vec![k],
        trials,
        11,
    )
    .unwrap();
    let row = &run_mse(&cfg).unwrap().rows[0];

    // standard error of the MSE from the same per-trial squared errors
    let sq: Vec<f64> = (0..trials)
        .map(|t| {
            let s = draw_sample(&layout, k, &mut trial_rng(11, k, t)).unwrap();
            let e = s.max() as f64 * (k + 1) as f64 / k as f64 - 1.0 - n as f64;
            e * e
        })
        .collect();
    let mean_sq = sq.iter().sum::<f64>() / trials as f64;
    assert!((mean_sq - row.mse).abs() < 1e-9 * mean_sq);
    let sd = (sq.iter().map(|v| (v - mean_sq).powi(2)).sum::<f64>() / (trials - 1) as f64).sqrt();
    let se = sd / (trials as f64).sqrt();

    let theory = (101.0 * 90.0) / 120.0;
    assert!(
        (row.mse - theory).abs() < 3.0 * se,
        "{} vs {theory} (se {se})",
        row.mse
    );
}

#[test]
fn empty_factory_fraction_moments() {
    let (l, n, k, trials) = (5u64, 100_000u64, 8u64, 200_000u64);
    let layout = FactoryLayout::uniform(l as usize, n, 0).unwrap();
    let fractions: Vec<f64> = (0..trials)
        .map(|t| {
            let s = draw_sample(&layout, k, &mut trial_rng(3, k, t)).unwrap();
            let mut hit = [false; 5];
            for &x in s.serials() {
                hit[layout.factory_of(x).unwrap()] = true;
            }
            hit.iter().filter(|h| !**h).count() as f64 / l as f64
        })
        .collect();
    let mean = fractions.iter().sum::<f64>() / trials as f64;
    let var = fractions.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;

    let (eq, vq) = (q_expectation(l, k).unwrap(), q_variance(l, k).unwrap());
    let se_mean = (vq / trials as f64).sqrt();
    assert!((mean - eq).abs() < 4.0 * se_mean, "mean {mean} vs {eq}");
    assert!((var - vq).abs() < 0.03 * vq, "variance {var} vs {vq}");
}

#[test]
fn mfp_is_nearly_unbiased_with_enough_samples() {
    let row = run_mse(&mfp_config(10_000))
        .unwrap()
        .rows
        .into_iter()
        .last()
        .unwrap();
    assert_eq!(row.k, 30);
    assert!((row.mean_estimate - 500.0).abs() < 25.0, "{row:?}");
}
