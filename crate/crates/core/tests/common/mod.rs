#![allow(dead_code)]

pub mod reference_mfp;

use rand::Rng;
use tankstat::sim::{build_layout, draw_sample, FactoryLayout};
use tankstat::Sample;

/// A random multi-factory sample: layout shape, sample size and the
/// known-minimum flag are all drawn from `rng`. Small gaps make ties between
/// consecutive differences common.
pub fn random_mfp_case<R: Rng>(rng: &mut R) -> (FactoryLayout, Sample, bool) {
    let l = rng.random_range(2..=6usize);
    let sizes: Vec<u64> = (0..l).map(|_| rng.random_range(1..=40)).collect();
    let gaps: Vec<u64> = (1..l)
        .map(|_| {
            if rng.random::<bool>() {
                rng.random_range(0..=4)
            } else {
                rng.random_range(0..=300)
            }
        })
        .collect();
    let layout = build_layout(sizes, gaps, 1).unwrap();
    let k = rng.random_range(l as u64..=layout.total().min(30));
    let sample = draw_sample(&layout, k, rng).unwrap();
    (layout, sample, rng.random())
}
