//! Probability that `k` serials drawn without replacement from `l` equal
//! factories of size `N` leave at least one factory unobserved.
//!
//! The exact value comes from inclusion–exclusion over the set of missed
//! factories:
//!
//! `P(N, l, k) = Σ_{i=1}^{l-1} (-1)^{i+1} C(l, i) C(N(l - i), k) / C(Nl, k)`.
//!
//! As `N → ∞` each term tends to `C(l, i) ((l - i)/l)^k`, which gives a limit
//! independent of `N`. The alternating sums cancel catastrophically in floating
//! point once `l` grows, so both are evaluated in exact arithmetic and only
//! converted to `f64` at the end.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, to_f64};
use crate::error::{Error, Result};

/// `(N, l, k)`: factory size, factory count and sample count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MissQuery {
    pub factory_size: u64,
    pub factories: u64,
    pub samples: u64,
}

impl MissQuery {
    pub fn new(factory_size: u64, factories: u64, samples: u64) -> Result<Self> {
        if factory_size < 1 || factories < 1 {
            return Err(Error::InvalidRange(format!(
                "factory size and factory count must be positive, got N = {factory_size}, l = {factories}"
            )));
        }
        let total = factory_size
            .checked_mul(factories)
            .ok_or_else(|| Error::InvalidRange("N * l overflows".into()))?;
        if samples < 1 || samples > total {
            return Err(Error::InvalidRange(format!(
                "need 1 <= k <= N*l = {total}, got k = {samples}"
            )));
        }
        Ok(MissQuery {
            factory_size,
            factories,
            samples,
        })
    }
}

/// Exact `P(N, l, k)`; zero when there is a single factory.
pub fn p_miss_exact(q: &MissQuery) -> BigRational {
    let (n, l, k) = (q.factory_size, q.factories, q.samples);
    let mut acc = BigInt::zero();
    for i in 1..l {
        let term = BigInt::from(binomial(l, i) * binomial(n * (l - i), k));
        if i % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    BigRational::new(acc, BigInt::from(binomial(n * l, k)))
}

fn check_limit_args(l: u64, k: u64) -> Result<()> {
    if l < 1 || k < 1 {
        return Err(Error::InvalidRange(format!(
            "need l >= 1 and k >= 1, got l = {l}, k = {k}"
        )));
    }
    Ok(())
}

/// Exact `N → ∞` limit, `Σ_{i=1}^{l-1} (-1)^{i+1} C(l, i) ((l - i)/l)^k`.
pub fn p_miss_limit_exact(l: u64, k: u64) -> Result<BigRational> {
    check_limit_args(l, k)?;
    let k32 = u32::try_from(k).map_err(|_| Error::InvalidRange(format!("k = {k} too large")))?;
    let mut acc = BigInt::zero();
    for i in 1..l {
        let term = BigInt::from(binomial(l, i) * BigUint::from(l - i).pow(k32));
        if i % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(BigRational::new(
        acc,
        BigInt::from(BigUint::from(l).pow(k32)),
    ))
}

/// [`p_miss_limit_exact`] as a float.
pub fn p_miss_limit(l: u64, k: u64) -> Result<f64> {
    p_miss_limit_exact(l, k).map(|p| to_f64(&p))
}

fn powi(base: f64, exp: u64) -> f64 {
    match i32::try_from(exp) {
        Ok(e) => base.powi(e),
        Err(_) => base.powf(exp as f64),
    }
}

/// Expected fraction of factories with no sample in the `N → ∞` limit,
/// `(1 - 1/l)^k`.
pub fn q_expectation(l: u64, k: u64) -> Result<f64> {
    if l < 1 {
        return Err(Error::InvalidRange("need l >= 1".into()));
    }
    Ok(powi(1.0 - 1.0 / l as f64, k))
}

/// Variance of the empty-factory fraction in the `N → ∞` limit, `ρ + σ` with
/// `ρ = ((1 - 1/l)^k - (1 - 2/l)^k) / l` and `σ = (1 - 2/l)^k - (1 - 1/l)^{2k}`.
///
/// Rejects `l < 2`.
pub fn q_variance(l: u64, k: u64) -> Result<f64> {
    if l < 2 {
        return Err(Error::InvalidRange(format!(
            "empty-factory variance needs l >= 2, got l = {l}"
        )));
    }
    let lf = l as f64;
    let one = powi(1.0 - 1.0 / lf, k);
    let two = powi(1.0 - 2.0 / lf, k);
    let rho = (one - two) / lf;
    let sigma = two - one * one;
    Ok((rho + sigma).max(0.0))
}

/// Growth regime `l = ⌊A k^c⌋` tying the factory count to the sample count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRegime {
    pub scale: f64,
    pub exponent: f64,
}

impl GrowthRegime {
    pub fn new(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0 && exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidRange(format!(
                "regime needs A > 0 and c > 0, got A = {scale}, c = {exponent}"
            )));
        }
        Ok(GrowthRegime { scale, exponent })
    }

    /// `⌊A k^c⌋`.
    pub fn factories_for(&self, k: u64) -> u64 {
        nudged(self.scale * (k as f64).powf(self.exponent)).floor() as u64
    }

    /// `⌈α l^{1/c}⌉` with `α = 1/A`.
    pub fn samples_for(&self, l: u64) -> u64 {
        let x = (l as f64).powf(1.0 / self.exponent) / self.scale;
        // nudge down so exact integers are not pushed up by rounding
        (x * (1.0 - 4.0 * f64::EPSILON)).ceil() as u64
    }
}

/// Values that are integers up to rounding error land on the integer.
fn nudged(x: f64) -> f64 {
    x * (1.0 + 4.0 * f64::EPSILON)
}

/// Which variable drives a [`regime_curve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeMapping {
    /// Inputs are sample counts; `l = ⌊A k^c⌋`.
    LOfK,
    /// Inputs are factory counts; `k = ⌈l^{1/c}/A⌉`.
    KOfL,
}

/// Finite factory size or the `N → ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorySize {
    Finite(u64),
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub k: u64,
    pub l: u64,
    pub p_miss: f64,
}

/// Miss probability along a growth regime, ordered by `k`.
///
/// Every offending point (an `l` of zero, or `k > N l` for finite `N`) is
/// collected into a single error.
pub fn regime_curve(
    regime: GrowthRegime,
    mapping: RegimeMapping,
    points: &[u64],
    size: FactorySize,
) -> Result<Vec<CurvePoint>> {
    let pairs: Vec<(u64, u64)> = points
        .iter()
        .map(|&x| match mapping {
            RegimeMapping::LOfK => (x, regime.factories_for(x)),
            RegimeMapping::KOfL => (regime.samples_for(x), x),
        })
        .collect();

    let offending: Vec<u64> = pairs
        .iter()
        .filter(|&&(k, l)| {
            k < 1
                || l < 1
                || matches!(size, FactorySize::Finite(n) if n.checked_mul(l).map_or(true, |t| k > t))
        })
        .map(|&(k, _)| k)
        .collect();
    if !offending.is_empty() {
        return Err(Error::InvalidRegimePoints {
            offending,
            reason: "each point needs k >= 1, l >= 1 and k <= N*l".into(),
        });
    }
    if let FactorySize::Finite(0) = size {
        return Err(Error::InvalidRange("factory size must be positive".into()));
    }

    let mut curve: Vec<CurvePoint> = pairs
        .par_iter()
        .map(|&(k, l)| {
            let p_miss = match size {
                FactorySize::Finite(n) => {
                    to_f64(&p_miss_exact(&MissQuery::new(n, l, k).expect("validated")))
                }
                FactorySize::Limit => p_miss_limit(l, k).expect("validated"),
            };
            CurvePoint { k, l, p_miss }
        })
        .collect();
    curve.sort_by_key(|p| p.k);
    Ok(curve)
}
