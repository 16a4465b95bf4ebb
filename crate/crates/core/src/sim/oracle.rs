//! Brute-force enumeration of every equally likely sample.
//!
//! Exact means and variances of a statistic over all `C(N_tot, k)` subsets of
//! a layout. This is the reference the closed forms and Monte Carlo runs are
//! checked against, so it shares nothing with them beyond the layout and the
//! estimator being scored.

use std::collections::HashMap;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::layout::FactoryLayout;
use crate::combinatorics::{binomial, ratio};
use crate::error::{Error, Result};
use crate::estimators::{gtp_exact, gtp_um_exact};
use crate::fixed_gap::fixed_gap_k1_exact;
use crate::mfp::mfp_estimate;
use crate::sample::Sample;

/// Default cap on the number of enumerated subsets.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Named statistics the oracle can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    Gtp,
    GtpUm,
    /// MFP estimate with known minimum; the `f64` result is taken exactly.
    Mfp,
    MfpMinUnknown,
    FixedGapK1,
    Max,
    Min,
    Spread,
    /// 1 when some factory contributed no serial, else 0.
    MissFactory,
    /// Fraction of factories that contributed no serial.
    EmptyFraction,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gtp" => Statistic::Gtp,
            "gtp-um" => Statistic::GtpUm,
            "mfp" => Statistic::Mfp,
            "mfp-min-unknown" => Statistic::MfpMinUnknown,
            "fixed-gap-k1" => Statistic::FixedGapK1,
            "max" => Statistic::Max,
            "min" => Statistic::Min,
            "spread" => Statistic::Spread,
            "miss-factory" => Statistic::MissFactory,
            "empty-fraction" => Statistic::EmptyFraction,
            other => return Err(Error::InvalidConfig(format!("unknown statistic {other:?}"))),
        })
    }
}

impl Statistic {
    pub const ALL: [Statistic; 10] = [
        Statistic::Gtp,
        Statistic::GtpUm,
        Statistic::Mfp,
        Statistic::MfpMinUnknown,
        Statistic::FixedGapK1,
        Statistic::Max,
        Statistic::Min,
        Statistic::Spread,
        Statistic::MissFactory,
        Statistic::EmptyFraction,
    ];

    /// Value on one sample, or `None` where the statistic is undefined
    /// (e.g. the unknown-minimum estimator on a singleton).
    pub fn evaluate(self, sample: &Sample, layout: &FactoryLayout) -> Option<BigRational> {
        let int = |v: u64| BigRational::from_integer(v.into());
        let empty = || {
            let mut hit = vec![false; layout.factories()];
            for &s in sample.serials() {
                hit[layout.factory_of(s).expect("sample drawn from layout")] = true;
            }
            hit.iter().filter(|h| !**h).count() as u64
        };
        match self {
            Statistic::Gtp => Some(gtp_exact(sample)),
            Statistic::GtpUm => gtp_um_exact(sample).ok(),
            Statistic::Mfp | Statistic::MfpMinUnknown => {
                let lower_known = self == Statistic::Mfp;
                mfp_estimate(sample, layout.factories(), lower_known)
                    .ok()
                    .and_then(|e| BigRational::from_float(e.value))
            }
            Statistic::FixedGapK1 => {
                let (_, g) = layout.uniform_params()?;
                Some(fixed_gap_k1_exact(
                    layout.factories() as u64,
                    g,
                    sample.max(),
                ))
            }
            Statistic::Max => Some(int(sample.max())),
            Statistic::Min => Some(int(sample.min())),
            Statistic::Spread => Some(int(sample.spread())),
            Statistic::MissFactory => Some(int(u64::from(empty() > 0))),
            Statistic::EmptyFraction => Some(ratio(empty(), layout.factories() as u64)),
        }
    }
}

/// Exact moments over every size-`k` subset.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// `C(N_tot, k)`.
    pub subsets: u64,
    /// Subsets on which the statistic was undefined; excluded from the moments.
    pub undefined: u64,
    /// `None` when the statistic was undefined everywhere.
    pub mean: Option<BigRational>,
    pub variance: Option<BigRational>,
}

/// Enumerates every size-`k` subset of `layout` and returns the exact mean and
/// (population) variance of `statistic` over them.
pub fn enumerate_oracle(
    layout: &FactoryLayout,
    k: u64,
    statistic: Statistic,
    budget: u64,
) -> Result<OracleResult> {
    if statistic == Statistic::FixedGapK1 && layout.uniform_params().is_none() {
        return Err(Error::InvalidConfig(
            "fixed-gap-k1 needs equal sizes and gaps".into(),
        ));
    }
    enumerate_with(layout, k, budget, |s| statistic.evaluate(s, layout))
}

/// [`enumerate_oracle`] for an arbitrary statistic.
pub fn enumerate_with<F>(
    layout: &FactoryLayout,
    k: u64,
    budget: u64,
    mut statistic: F,
) -> Result<OracleResult>
where
    F: FnMut(&Sample) -> Option<BigRational>,
{
    let n = layout.total();
    if k < 1 || k > n {
        return Err(Error::Oversample {
            requested: k,
            available: n,
        });
    }
    let count: BigUint = binomial(n, k);
    let subsets = match count.to_u64() {
        Some(c) if c <= budget => c,
        _ => {
            return Err(Error::BudgetExceeded {
                count: count.to_string(),
                budget,
            })
        }
    };

    // Statistics take few distinct values, so tally a histogram and sum once.
    let mut histogram: HashMap<BigRational, u64> = HashMap::new();
    let mut undefined = 0u64;
    let k = k as usize;
    let mut idx: Vec<u64> = (0..k as u64).collect();
    loop {
        let serials = idx.iter().map(|&i| layout.serial_at(i)).collect();
        let sample = Sample::from_sorted(serials).expect("indices strictly increasing");
        match statistic(&sample) {
            Some(v) => *histogram.entry(v).or_insert(0) += 1,
            None => undefined += 1,
        }
        // next combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - (k - i) as u64) else {
            break;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }

    let defined = subsets - undefined;
    let (mean, variance) = if defined == 0 {
        (None, None)
    } else {
        let total = BigRational::from_integer(defined.into());
        let mut sum = BigRational::zero();
        let mut sum_sq = BigRational::zero();
        for (v, c) in &histogram {
            let c = BigRational::from_integer((*c).into());
            sum_sq += v * v * &c;
            sum += v * c;
        }
        let mean = sum / &total;
        let variance = sum_sq / &total - &mean * &mean;
        (Some(mean), Some(variance))
    };
    Ok(OracleResult {
        subsets,
        undefined,
        mean,
        variance,
    })
}
