//! Single-factory estimators.
//!
//! With `k` serials drawn without replacement from `{1..N}` the classical
//! estimator is `M(1 + 1/k) - 1`, where `M` is the sample maximum. When the
//! range is `{a..a+N-1}` with `a` unknown, the spread `S = M - W` replaces the
//! maximum and the estimator becomes `S(1 + 2/(k-1)) - 1`. Both are unbiased;
//! the exact distributional facts behind that (spread distribution, moments,
//! variances) are exposed here as exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::combinatorics::{binomial, ratio};
use crate::error::{Error, Result};
use crate::estimate::{Estimate, Method};
use crate::sample::Sample;

/// Known-minimum estimate `M(1 + 1/k) - 1`. Accepts singletons (`2M - 1`).
pub fn gtp_estimate(sample: &Sample) -> Estimate {
    let k = sample.len() as f64;
    let m = sample.max() as f64;
    Estimate::plain(m * (k + 1.0) / k - 1.0, Method::Gtp)
}

/// Unknown-minimum estimate `S(1 + 2/(k-1)) - 1`; needs at least two serials.
pub fn gtp_um_estimate(sample: &Sample) -> Result<Estimate> {
    if sample.len() < 2 {
        return Err(Error::InsufficientSample {
            estimator: "GTP-UM",
            needed: 2,
            got: sample.len(),
        });
    }
    let k = sample.len() as f64;
    let s = sample.spread() as f64;
    Ok(Estimate::plain(
        s * (k + 1.0) / (k - 1.0) - 1.0,
        Method::GtpUm,
    ))
}

/// [`gtp_estimate`] in exact arithmetic: `M(k + 1)/k - 1`.
pub fn gtp_exact(sample: &Sample) -> BigRational {
    let k = sample.len() as u64;
    ratio(BigInt::from(sample.max()) * (k + 1), k) - BigRational::from_integer(1.into())
}

/// [`gtp_um_estimate`] in exact arithmetic: `S(k + 1)/(k - 1) - 1`.
pub fn gtp_um_exact(sample: &Sample) -> Result<BigRational> {
    let k = sample.len() as u64;
    if k < 2 {
        return Err(Error::InsufficientSample {
            estimator: "GTP-UM",
            needed: 2,
            got: sample.len(),
        });
    }
    Ok(ratio(BigInt::from(sample.spread()) * (k + 1), k - 1) - BigRational::from_integer(1.into()))
}

fn check_um_range(n: u64, k: u64) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::InvalidRange(format!(
            "need 2 <= k <= N, got N = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// `P(S = s) = (N - s) C(s - 1, k - 2) / C(N, k)` for `s` in `k-1 ..= N-1`, zero elsewhere.
pub fn spread_pmf(n: u64, k: u64, s: u64) -> Result<BigRational> {
    check_um_range(n, k)?;
    if s + 1 < k || s >= n {
        return Ok(BigRational::zero());
    }
    Ok(ratio(
        BigInt::from(n - s) * BigInt::from(binomial(s - 1, k - 2)),
        binomial(n, k),
    ))
}

/// First two moments of the spread and its variance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadMoments {
    pub mean: BigRational,
    pub second_moment: BigRational,
    pub variance: BigRational,
}

/// Closed-form spread moments:
/// `E[S] = (N+1)(k-1)/(k+1)`,
/// `E[S²] = k(k-1)(N+1)(N+2)/((k+1)(k+2)) - (N+1)(k-1)/(k+1)`,
/// `Var(S) = 2(k-1)(N+1)(N-k)/((k+1)²(k+2))`.
pub fn spread_moments(n: u64, k: u64) -> Result<SpreadMoments> {
    check_um_range(n, k)?;
    let (n, k) = (BigInt::from(n), BigInt::from(k));
    let one = BigInt::from(1);
    let two = BigInt::from(2);
    let mean = ratio((&n + &one) * (&k - &one), &k + &one);
    let second_moment = ratio(
        &k * (&k - &one) * (&n + &one) * (&n + &two),
        (&k + &one) * (&k + &two),
    ) - &mean;
    let variance = ratio(
        &two * (&k - &one) * (&n + &one) * (&n - &k),
        (&k + &one) * (&k + &one) * (&k + &two),
    );
    debug_assert_eq!(variance, &second_moment - &mean * &mean);
    Ok(SpreadMoments {
        mean,
        second_moment,
        variance,
    })
}

/// Variance of the known-minimum estimator, `(N+1)(N-k)/(k(k+2))`.
pub fn gtp_variance(n: u64, k: u64) -> Result<BigRational> {
    if k < 1 || k > n {
        return Err(Error::InvalidRange(format!(
            "need 1 <= k <= N, got N = {n}, k = {k}"
        )));
    }
    Ok(ratio(
        BigInt::from(n + 1) * BigInt::from(n - k),
        BigInt::from(k) * BigInt::from(k + 2),
    ))
}

/// Variance of the unknown-minimum estimator, `2(N+1)(N-k)/((k-1)(k+2))`.
pub fn gtp_um_variance(n: u64, k: u64) -> Result<BigRational> {
    check_um_range(n, k)?;
    Ok(ratio(
        BigInt::from(2) * BigInt::from(n + 1) * BigInt::from(n - k),
        BigInt::from(k - 1) * BigInt::from(k + 2),
    ))
}
