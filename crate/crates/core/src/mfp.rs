//! Total-production estimate when serials come from `l` factories whose
//! ranges are separated by unknown gaps.
//!
//! The ordered sample is cut at its `l - 1` widest consecutive differences
//! (ties go to the leftmost), giving one sub-sample per factory. The first
//! factory's range starts at 1, so it gets the known-minimum estimator; the
//! rest get the unknown-minimum estimator. A later sub-sample with a single
//! serial cannot be estimated on its own and is assigned `𝒩 / k̃`, the summed
//! estimate of the well-sampled factories per sample they contributed.
//!
//! ```
//! use tankstat::{mfp::mfp_estimate, Sample};
//!
//! let sample = Sample::new(vec![1, 2, 3, 50, 51, 200]).unwrap();
//! let est = mfp_estimate(&sample, 3, true).unwrap();
//! assert_eq!(est.value, 6.0);
//! assert_eq!(est.mfp_split().unwrap().bad_indices, vec![2]);
//! ```

use std::cmp::Reverse;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{Diagnostics, Estimate, Method};
use crate::estimators::{gtp_estimate, gtp_um_estimate};
use crate::sample::Sample;

/// Partition of an ordered sample at its widest gaps.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GapSplit {
    /// One sub-sample per factory, in serial order.
    pub sub_samples: Vec<Sample>,
    /// Gap `i` lies between ordered serials `i` and `i + 1` (0-based); these are
    /// the cut positions, strictly increasing.
    pub chosen_gap_positions: Vec<usize>,
}

/// Full trace of an MFP estimate. Indices are 0-based sub-sample positions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MfpSplit {
    pub sub_samples: Vec<Sample>,
    pub chosen_gap_positions: Vec<usize>,
    /// Per-factory estimates, including the patched value for bad entries.
    pub sub_estimates: Vec<f64>,
    pub good_indices: Vec<usize>,
    pub bad_indices: Vec<usize>,
    /// `𝒩`: sum of the good sub-estimates.
    pub n_good_sum: f64,
    /// `k̃`: number of serials in good sub-samples.
    pub k_good_sum: usize,
    /// `𝒩 / k̃`, present when some sub-sample was bad.
    pub bad_estimate: Option<f64>,
    pub lower_known: bool,
}

/// Cuts `sample` into `l` runs at its `l - 1` widest gaps.
pub fn split_at_largest_gaps(sample: &Sample, l: usize) -> Result<GapSplit> {
    if l < 2 {
        return Err(Error::InvalidRange(format!(
            "need at least two factories, got {l}"
        )));
    }
    if sample.len() < l {
        return Err(Error::TooFewSamples {
            samples: sample.len(),
            factories: l,
        });
    }
    let gaps = sample.gaps();
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by_key(|&i| (Reverse(gaps[i]), i));
    let mut cuts = order[..l - 1].to_vec();
    cuts.sort_unstable();

    let mut sub_samples = Vec::with_capacity(l);
    let mut start = 0;
    for &cut in &cuts {
        sub_samples.push(sample.slice(start..cut + 1));
        start = cut + 1;
    }
    sub_samples.push(sample.slice(start..sample.len()));
    Ok(GapSplit {
        sub_samples,
        chosen_gap_positions: cuts,
    })
}

/// Estimates total production across `l` factories.
///
/// With `lower_known = false` the first factory is treated like the others;
/// should its sub-sample be a singleton it is patched like any other bad
/// sub-sample.
pub fn mfp_estimate(sample: &Sample, l: usize, lower_known: bool) -> Result<Estimate> {
    let GapSplit {
        sub_samples,
        chosen_gap_positions,
    } = split_at_largest_gaps(sample, l)?;

    let mut sub_estimates = vec![0.0; l];
    let mut good_indices = Vec::with_capacity(l);
    let mut bad_indices = Vec::new();
    let mut n_good_sum = 0.0;
    let mut k_good_sum = 0;
    for (i, sub) in sub_samples.iter().enumerate() {
        let estimate = if i == 0 && lower_known {
            Some(gtp_estimate(sub).value)
        } else if sub.len() >= 2 {
            Some(gtp_um_estimate(sub)?.value)
        } else {
            None
        };
        match estimate {
            Some(v) => {
                sub_estimates[i] = v;
                n_good_sum += v;
                k_good_sum += sub.len();
                good_indices.push(i);
            }
            None => bad_indices.push(i),
        }
    }

    let bad_estimate = if bad_indices.is_empty() {
        None
    } else if k_good_sum == 0 {
        return Err(Error::DegenerateSplit);
    } else {
        let patch = n_good_sum / k_good_sum as f64;
        for &i in &bad_indices {
            sub_estimates[i] = patch;
        }
        Some(patch)
    };

    let value = sub_estimates.iter().sum();
    Ok(Estimate {
        value,
        method: Method::Mfp,
        diagnostics: Some(Diagnostics::Mfp(MfpSplit {
            sub_samples,
            chosen_gap_positions,
            sub_estimates,
            good_indices,
            bad_indices,
            n_good_sum,
            k_good_sum,
            bad_estimate,
            lower_known,
        })),
    })
}
