//! Estimating the common factory size `N` when there are `l` factories of equal
//! size separated by gaps of a fixed, known width `G`.
//!
//! Every valid serial `m` in factory `f` (1-based) decomposes as
//! `m = x̃ + H` with `H = G(f - 1)` the gaps below it and `x̃` the serial it
//! would have had without gaps, so `x̃` ranges over `{1..lN}`. The sample
//! maximum's gap-free part behaves like the classical problem on `lN` serials,
//! and the offset has the exact expectation
//!
//! `E[H] = Gl - G Σ_{t=1}^{l} C(tN, k) / C(lN, k)`.
//!
//! For one sample that expectation gives an exactly unbiased estimator. For
//! larger `k` the sum is approximated from the two leading power-sum terms,
//! giving a closed-form approximate estimator.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, ratio, to_f64};
use crate::error::{Error, Result};
use crate::estimate::{Diagnostics, Estimate, FixedGapDiagnostics, Method};

/// `l` factories of `N` serials each, consecutive factories separated by `G`
/// unused serials, numbering starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedGapModel {
    pub factories: u64,
    pub gap: u64,
    pub factory_size: u64,
}

impl FixedGapModel {
    pub fn new(factories: u64, gap: u64, factory_size: u64) -> Result<Self> {
        if factories < 1 || factory_size < 1 {
            return Err(Error::InvalidRange(format!(
                "need l >= 1 and N >= 1, got l = {factories}, N = {factory_size}"
            )));
        }
        Ok(FixedGapModel {
            factories,
            gap,
            factory_size,
        })
    }

    /// `lN`, the number of valid serials.
    pub fn total_serials(&self) -> u64 {
        self.factories * self.factory_size
    }

    /// 1-based factory holding serial `m`, or `None` if `m` is in a gap or out of range.
    pub fn factory_of(&self, m: u64) -> Option<u64> {
        if m == 0 {
            return None;
        }
        let period = self.factory_size + self.gap;
        let (index, offset) = ((m - 1) / period, (m - 1) % period);
        (offset < self.factory_size && index < self.factories).then_some(index + 1)
    }

    /// Gap-free serial `x̃ = m - G(f - 1)`.
    pub fn gap_free(&self, m: u64) -> Option<u64> {
        self.offset(m).map(|h| m - h)
    }

    /// Offset `H = G(f - 1)`.
    pub fn offset(&self, m: u64) -> Option<u64> {
        self.factory_of(m).map(|f| self.gap * (f - 1))
    }

    /// All valid serials in increasing order.
    pub fn serials(&self) -> impl Iterator<Item = u64> + '_ {
        let period = self.factory_size + self.gap;
        (0..self.factories).flat_map(move |f| {
            let start = f * period + 1;
            start..start + self.factory_size
        })
    }

    fn check_k(&self, k: u64) -> Result<()> {
        if k < 1 || k > self.total_serials() {
            return Err(Error::InvalidRange(format!(
                "need 1 <= k <= lN = {}, got k = {k}",
                self.total_serials()
            )));
        }
        Ok(())
    }
}

/// `P(M = m) = C(x̃ - 1, k - 1) / C(lN, k)` for a valid serial `m`.
pub fn max_pmf(model: &FixedGapModel, k: u64, m: u64) -> Result<BigRational> {
    model.check_k(k)?;
    let x = model.gap_free(m).ok_or(Error::InvalidSerial(m))?;
    Ok(ratio(
        binomial(x - 1, k - 1),
        binomial(model.total_serials(), k),
    ))
}

/// Exact `E[H] = Gl - G Σ_{t=1}^{l} C(tN, k) / C(lN, k)`, valid for every
/// `1 <= k <= lN`.
pub fn expected_h_exact(model: &FixedGapModel, k: u64) -> Result<BigRational> {
    model.check_k(k)?;
    let (l, n, g) = (model.factories, model.factory_size, model.gap);
    let sum: BigInt = (1..=l).map(|t| BigInt::from(binomial(t * n, k))).sum();
    let gl = BigRational::from_integer(BigInt::from(g) * l);
    Ok(gl - ratio(sum * g, binomial(l * n, k)))
}

/// Exact `E[M] = k(lN + 1)/(k + 1) + E[H]`.
pub fn expected_max_exact(model: &FixedGapModel, k: u64) -> Result<BigRational> {
    let h = expected_h_exact(model, k)?;
    Ok(ratio(BigInt::from(k) * (model.total_serials() + 1), k + 1) + h)
}

/// Approximate offset expectation with a flag for leaving its intended regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HApprox {
    pub value: f64,
    /// Set when `k > N`; the approximation assumes `k` small against `lN`.
    pub out_of_regime: bool,
}

/// `E[H] ≈ G(kl/(k + 1) - 1/2)`.
pub fn expected_h_approx(model: &FixedGapModel, k: u64) -> HApprox {
    let (l, g, k_f) = (model.factories as f64, model.gap as f64, k as f64);
    HApprox {
        value: g * (k_f * l / (k_f + 1.0) - 0.5),
        out_of_regime: k > model.factory_size,
    }
}

fn fixed_gap_output(value: f64, method: Method, k: u64) -> Estimate {
    Estimate {
        value,
        method,
        diagnostics: Some(Diagnostics::FixedGap(FixedGapDiagnostics {
            clamped: value.max(k as f64),
            k,
        })),
    }
}

/// Unbiased single-sample estimate `(2M - G(l - 1) - 1)/l`. Can be negative;
/// the raw value is returned.
pub fn fixed_gap_estimate_k1(l: u64, gap: u64, max: u64) -> Estimate {
    let (l, g, m) = (l as f64, gap as f64, max as f64);
    fixed_gap_output(
        (2.0 * m - g * (l - 1.0) - 1.0) / l,
        Method::FixedGapExactK1,
        1,
    )
}

/// Exact rational form of [`fixed_gap_estimate_k1`].
pub fn fixed_gap_k1_exact(l: u64, gap: u64, max: u64) -> BigRational {
    let numerator = BigInt::from(2 * max) - BigInt::from(gap) * (l - 1) - 1;
    ratio(numerator, l)
}

fn check_estimate_args(l: u64, k: u64, max: u64) -> Result<()> {
    if l < 1 || k < 1 || max < k {
        return Err(Error::InvalidRange(format!(
            "need l >= 1, k >= 1 and M >= k, got l = {l}, k = {k}, M = {max}"
        )));
    }
    Ok(())
}

/// Approximate estimate `((k + 1)M/k - Gl + G(k + 1)/(2k) - 1)/l` from the
/// observed maximum `M` of `k` serials.
pub fn fixed_gap_estimate(l: u64, gap: u64, k: u64, max: u64) -> Result<Estimate> {
    check_estimate_args(l, k, max)?;
    let (l_f, g, k_f, m) = (l as f64, gap as f64, k as f64, max as f64);
    let value = ((k_f + 1.0) * m / k_f - g * l_f + g * (k_f + 1.0) / (2.0 * k_f) - 1.0) / l_f;
    Ok(fixed_gap_output(value, Method::FixedGapApprox, k))
}

/// Solves `E[M](N) = M` for `N` using the exact expected maximum.
///
/// `E[M]` is evaluated at integer `N` and bisected for the smallest `N` whose
/// expected maximum reaches `M`; the answer is interpolated linearly between
/// that `N` and its predecessor. When even the smallest admissible
/// `N = ⌈k/l⌉` overshoots, that smallest `N` is returned.
pub fn fixed_gap_estimate_inverted(l: u64, gap: u64, k: u64, max: u64) -> Result<Estimate> {
    check_estimate_args(l, k, max)?;
    let expected = |n: u64| -> BigRational {
        expected_max_exact(&FixedGapModel::new(l, gap, n).expect("n >= 1"), k)
            .expect("k <= lN by construction")
    };
    let target = BigRational::from_integer(max.into());
    let lowest = k.div_ceil(l);
    if expected(lowest) >= target {
        return Ok(fixed_gap_output(lowest as f64, Method::FixedGapInverted, k));
    }
    // E[M](N) >= k(lN + 1)/(k + 1) >= M once lN >= (k + 1)M/k.
    let mut hi = ((k + 1) * max).div_ceil(k).div_ceil(l) + 1;
    let mut lo = lowest;
    debug_assert!(expected(hi) >= target);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if expected(mid) >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (e_lo, e_hi) = (expected(lo), expected(hi));
    let step = &e_hi - &e_lo;
    let frac = if step.is_zero() {
        0.0
    } else {
        to_f64(&((&target - &e_lo) / step))
    };
    Ok(fixed_gap_output(
        lo as f64 + frac,
        Method::FixedGapInverted,
        k,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn model(l: u64, g: u64, n: u64) -> FixedGapModel {
        FixedGapModel::new(l, g, n).unwrap()
    }

    /// Exhaustive distribution of the sample maximum: counts of each max over
    /// all size-k subsets of the valid serials.
    fn brute_max_counts(m: &FixedGapModel, k: usize) -> (Vec<(u64, u64)>, u64) {
        let serials: Vec<u64> = m.serials().collect();
        let n = serials.len();
        let mut counts = std::collections::BTreeMap::new();
        let mut total = 0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            total += 1;
            let top = 31 - mask.leading_zeros();
            *counts.entry(serials[top as usize]).or_insert(0u64) += 1;
        }
        (counts.into_iter().collect(), total)
    }

    #[test]
    fn serial_decomposition() {
        let m = model(2, 4, 3);
        assert_eq!(m.serials().collect::<Vec<_>>(), vec![1, 2, 3, 8, 9, 10]);
        assert_eq!(m.factory_of(3), Some(1));
        assert_eq!(m.factory_of(4), None);
        assert_eq!(m.factory_of(7), None);
        assert_eq!(m.factory_of(8), Some(2));
        assert_eq!(m.factory_of(11), None);
        assert_eq!(m.factory_of(0), None);
        assert_eq!(m.gap_free(10), Some(6));
        assert_eq!(m.offset(10), Some(4));
        let zero_gap = model(3, 0, 2);
        assert_eq!(zero_gap.factory_of(4), Some(2));
        assert_eq!(zero_gap.offset(6), Some(0));
        assert_eq!(zero_gap.factory_of(7), None);
    }

    #[test]
    fn max_pmf_examples() {
        let m = model(2, 4, 3);
        for s in m.serials() {
            assert_eq!(max_pmf(&m, 1, s).unwrap(), ratio(1, 6));
        }
        assert_eq!(max_pmf(&m, 6, 10).unwrap(), BigRational::one());
        assert!(max_pmf(&m, 6, 9).unwrap().is_zero());
        assert_eq!(max_pmf(&m, 1, 5), Err(Error::InvalidSerial(5)));
        assert_eq!(max_pmf(&m, 1, 11), Err(Error::InvalidSerial(11)));
        assert!(max_pmf(&m, 7, 10).is_err());

        let m = model(2, 3, 2);
        let pmf: Vec<_> = [2, 6, 7]
            .iter()
            .map(|&s| max_pmf(&m, 2, s).unwrap())
            .collect();
        assert_eq!(pmf, vec![ratio(1, 6), ratio(2, 6), ratio(3, 6)]);
        assert!(max_pmf(&m, 2, 1).unwrap().is_zero());
    }

    #[test]
    fn max_pmf_matches_subset_enumeration() {
        for (l, g, n) in [(2, 3, 2), (3, 1, 3), (2, 0, 4), (4, 2, 2), (3, 5, 4)] {
            let m = model(l, g, n);
            for k in 1..=m.total_serials() {
                let (counts, total) = brute_max_counts(&m, k as usize);
                let mut sum = BigRational::zero();
                for s in m.serials() {
                    let hits = counts.iter().find(|c| c.0 == s).map_or(0, |c| c.1);
                    let p = max_pmf(&m, k, s).unwrap();
                    assert_eq!(p, ratio(hits, total), "l={l} G={g} N={n} k={k} m={s}");
                    sum += p;
                }
                assert_eq!(sum, BigRational::one());
            }
        }
    }

    #[test]
    fn expected_h_examples() {
        assert_eq!(expected_h_exact(&model(2, 4, 3), 1).unwrap(), ratio(2, 1));
        assert_eq!(expected_h_exact(&model(2, 3, 2), 2).unwrap(), ratio(15, 6));
        let m = model(3, 7, 4);
        let weighted: BigRational = m
            .serials()
            .map(|s| max_pmf(&m, 3, s).unwrap() * ratio(m.offset(s).unwrap(), 1))
            .sum();
        assert_eq!(expected_h_exact(&m, 3).unwrap(), weighted);
        assert!(expected_h_exact(&m, 0).is_err());
        assert!(expected_h_exact(&m, 13).is_err());
    }

    #[test]
    fn expected_h_k1_closed_form() {
        for l in 1..6 {
            for g in 0..8 {
                for n in 1..6 {
                    let m = model(l, g, n);
                    assert_eq!(
                        expected_h_exact(&m, 1).unwrap(),
                        ratio(g * (l - 1), 2),
                        "l={l} G={g} N={n}"
                    );
                    assert_eq!(expected_h_approx(&m, 1).value, (g * (l - 1)) as f64 / 2.0);
                }
            }
        }
    }

    #[test]
    fn approximation_accuracy() {
        // k small against l: the dropped Faulhaber terms are O(k/l)
        let m = model(50, 10, 1000);
        let exact = to_f64(&expected_h_exact(&m, 3).unwrap());
        let approx = expected_h_approx(&m, 3);
        assert!(!approx.out_of_regime);
        assert!(
            (approx.value - exact).abs() / exact < 0.01,
            "{approx:?} vs {exact}"
        );

        // k = 2l: the next term G k/(12 l) is no longer negligible (about 4%)
        let m = model(5, 50, 1000);
        let exact = to_f64(&expected_h_exact(&m, 10).unwrap());
        let approx = expected_h_approx(&m, 10);
        assert!(!approx.out_of_regime);
        assert!((approx.value - 202.272_727_272_727_3).abs() < 1e-9);
        assert!((exact - 194.337_677_464).abs() < 1e-6, "{exact}");

        // far outside the regime the two disagree, and the flag says so
        let m = model(2, 4, 3);
        let exact = to_f64(&expected_h_exact(&m, 6).unwrap());
        let approx = expected_h_approx(&m, 6);
        assert!(approx.out_of_regime);
        assert_eq!(exact, 4.0);
        assert!((approx.value - 34.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn k1_estimates() {
        assert_eq!(fixed_gap_estimate_k1(2, 4, 10).value, 7.5);
        for m in 1..50 {
            assert_eq!(fixed_gap_estimate_k1(1, 17, m).value, (2 * m - 1) as f64);
        }
        // one sample from T = {1,2,3,8,9,10} is unbiased for N = 3
        let m = model(2, 4, 3);
        let mean: BigRational = m
            .serials()
            .map(|s| fixed_gap_k1_exact(2, 4, s))
            .sum::<BigRational>()
            / ratio(6, 1);
        assert_eq!(mean, ratio(3, 1));
        let low = fixed_gap_estimate_k1(3, 10, 1);
        assert!(low.value < 0.0);
        match low.diagnostics {
            Some(Diagnostics::FixedGap(d)) => assert_eq!(d.clamped, 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn approximate_estimate_examples() {
        let est = fixed_gap_estimate(5, 50, 10, 700).unwrap();
        assert!((est.value - 109.3).abs() < 1e-12);
        assert_eq!(est.method, Method::FixedGapApprox);
        assert!(fixed_gap_estimate(5, 50, 0, 700).is_err());
        assert!(fixed_gap_estimate(5, 50, 10, 9).is_err());
        assert!(fixed_gap_estimate(0, 50, 1, 9).is_err());
    }

    #[test]
    fn approximate_matches_exact_at_k1() {
        for l in 1..8 {
            for g in 0..20 {
                for m in 1..60 {
                    let a = fixed_gap_estimate(l, g, 1, m).unwrap().value;
                    let b = fixed_gap_estimate_k1(l, g, m).value;
                    assert!((a - b).abs() < 1e-9, "l={l} G={g} M={m}");
                }
            }
        }
    }

    #[test]
    fn expected_max_decomposition() {
        for (l, g, n) in [(2, 3, 2), (3, 1, 3), (4, 6, 5), (2, 0, 7)] {
            let m = model(l, g, n);
            for k in 1..=m.total_serials() {
                let direct: BigRational = m
                    .serials()
                    .map(|s| max_pmf(&m, k, s).unwrap() * ratio(s, 1))
                    .sum();
                assert_eq!(expected_max_exact(&m, k).unwrap(), direct);
            }
        }
    }

    #[test]
    fn inversion_recovers_expected_maximum() {
        // feeding E[M](N) back in returns N
        for (l, g, k, n) in [(2, 4, 1, 3), (5, 50, 10, 100), (3, 7, 4, 20)] {
            let e = to_f64(&expected_max_exact(&model(l, g, n), k).unwrap());
            // interpolation between integers: exact when M hits E[M](N) exactly,
            // so use the floor and check we land in [N - 1, N]
            let est = fixed_gap_estimate_inverted(l, g, k, e.floor() as u64).unwrap();
            assert!(
                est.value > (n - 1) as f64 && est.value <= n as f64,
                "{est:?}"
            );
            assert_eq!(est.method, Method::FixedGapInverted);
        }
        // overshoot at the smallest admissible N returns it
        let est = fixed_gap_estimate_inverted(2, 4, 3, 3).unwrap();
        assert_eq!(est.value, 2.0);
    }
}
