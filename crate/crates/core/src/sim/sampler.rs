use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::layout::FactoryLayout;
use crate::error::{Error, Result};
use crate::sample::Sample;

/// Draws `k` distinct serials uniformly without replacement.
///
/// Runs a partial Fisher–Yates shuffle over the virtual index space
/// `0..N_tot`, storing only displaced entries, then maps indices to serials
/// through the layout. Memory is `O(k)` regardless of `N_tot`.
pub fn draw_sample<R: Rng + ?Sized>(layout: &FactoryLayout, k: u64, rng: &mut R) -> Result<Sample> {
    let n = layout.total();
    if k > n {
        return Err(Error::Oversample {
            requested: k,
            available: n,
        });
    }
    if k == 0 {
        return Err(Error::EmptySample);
    }
    let mut displaced: HashMap<u64, u64> = HashMap::with_capacity(k as usize);
    let mut picked = Vec::with_capacity(k as usize);
    for i in 0..k {
        let j = rng.random_range(i..n);
        let at_j = displaced.get(&j).copied().unwrap_or(j);
        let at_i = displaced.get(&i).copied().unwrap_or(i);
        displaced.insert(j, at_i);
        picked.push(layout.serial_at(at_j));
    }
    picked.sort_unstable();
    Sample::from_sorted(picked)
}

/// Independent generator for one Monte Carlo trial.
///
/// The ChaCha key is the triple `(seed, k, trial)` itself, so every trial's
/// stream is fixed by its coordinates and not by scheduling order.
pub fn trial_rng(seed: u64, k: u64, trial: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&k.to_le_bytes());
    key[16..24].copy_from_slice(&trial.to_le_bytes());
    key[24..].copy_from_slice(b"tankstat");
    ChaCha8Rng::from_seed(key)
}
