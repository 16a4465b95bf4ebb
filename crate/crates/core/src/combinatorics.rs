//! Exact binomial coefficients and evaluators for the binomial identities the
//! spread moments rest on.
//!
//! Everything here is exact. Identity evaluators return both sides of the
//! identity rather than a boolean so a failing check carries the values that
//! disagreed.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `C(n, k)`, with `C(n, k) = 0` whenever `k > n`.
///
/// Uses the multiplicative recurrence `C(n, i + 1) = C(n, i) (n - i) / (i + 1)`,
/// where every division is exact, over `min(k, n - k)` steps.
///
/// ```
/// use tankstat::combinatorics::binomial;
/// assert_eq!(binomial(5, 2), 10u32.into());
/// assert_eq!(binomial(3, 7), 0u32.into());
/// ```
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Builds the exact fraction `num / den`. Panics if `den` is zero.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Converts an exact rational to the nearest `f64`.
pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

fn int(n: u64) -> BigInt {
    BigInt::from(n)
}

/// Both sides of the hockey stick identity `Σ_{i=r}^{n} C(i, r) = C(n + 1, r + 1)`.
pub fn hockey_stick_sides(n: u64, r: u64) -> Result<(BigUint, BigUint)> {
    if n < r {
        return Err(Error::InvalidRange(format!(
            "hockey stick needs n >= r, got n = {n}, r = {r}"
        )));
    }
    let lhs = (r..=n).map(|i| binomial(i, r)).sum();
    Ok((lhs, binomial(n + 1, r + 1)))
}

fn check_identity_range(n: u64, k: u64, b: u64) -> Result<()> {
    if !(b >= 1 && k >= b && n >= k) {
        return Err(Error::InvalidRange(format!(
            "need N >= k >= b >= 1, got N = {n}, k = {k}, b = {b}"
        )));
    }
    Ok(())
}

/// `Σ_m m^power C(m - 1, k - b) C(N - m, b - 1)` over `m = k - b + 1 ..= N - b + 1`.
fn weighted_order_sum(n: u64, k: u64, b: u64, power: u32) -> BigUint {
    (k - b + 1..=n - b + 1)
        .map(|m| BigUint::from(m).pow(power) * binomial(m - 1, k - b) * binomial(n - m, b - 1))
        .sum()
}

/// Both sides of the first moment identity for the `b`-th largest of `k` draws
/// from `{1..N}`:
///
/// `Σ m C(m-1, k-b) C(N-m, b-1) / C(N, k) = (N + 1)(k - b + 1) / (k + 1)`.
pub fn identity_i_sides(n: u64, k: u64, b: u64) -> Result<(BigRational, BigRational)> {
    check_identity_range(n, k, b)?;
    let lhs = ratio(weighted_order_sum(n, k, b, 1), binomial(n, k));
    let rhs = ratio(int(n + 1) * int(k - b + 1), int(k + 1));
    Ok((lhs, rhs))
}

/// Both sides of the second moment identity:
///
/// `Σ m² C(m-1, k-b) C(N-m, b-1) / C(N, k)
///   = (k-b+1)(k-b+2)(N+2)(N+1) / ((k+2)(k+1)) - (N+1)(k-b+1) / (k+1)`.
pub fn identity_ii_sides(n: u64, k: u64, b: u64) -> Result<(BigRational, BigRational)> {
    check_identity_range(n, k, b)?;
    let lhs = ratio(weighted_order_sum(n, k, b, 2), binomial(n, k));
    let first = ratio(
        int(k - b + 1) * int(k - b + 2) * int(n + 2) * int(n + 1),
        int(k + 2) * int(k + 1),
    );
    let second = ratio(int(n + 1) * int(k - b + 1), int(k + 1));
    Ok((lhs, first - second))
}

/// Both sides of `C(a + b + k + 1, a + b + 1) = Σ_{i=0}^{k} C(a + i, a) C(b + k - i, b)`.
/// The left element of the pair is the single binomial.
pub fn identity_iii_sides(a: u64, b: u64, k: u64) -> (BigUint, BigUint) {
    let lhs = binomial(a + b + k + 1, a + b + 1);
    let rhs = (0..=k)
        .map(|i| binomial(a + i, a) * binomial(b + k - i, b))
        .sum();
    (lhs, rhs)
}

/// Parameter grid for [`check_identity_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdentityGrid {
    /// Identities I and II are checked for all `1 <= b <= k <= N <= max_n`.
    pub max_n: u64,
    /// Identity III is checked for `a, b <= max_ab`.
    pub max_ab: u64,
    /// ... and `k <= max_k`.
    pub max_k: u64,
    /// Hockey stick is checked for all `0 <= r <= n <= max_hockey`.
    pub max_hockey: u64,
}

impl Default for IdentityGrid {
    fn default() -> Self {
        IdentityGrid {
            max_n: 30,
            max_ab: 8,
            max_k: 12,
            max_hockey: 60,
        }
    }
}

/// Counts of evaluated cases per identity and a description of every case whose
/// sides disagreed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IdentityReport {
    pub identity_i: usize,
    pub identity_ii: usize,
    pub identity_iii: usize,
    pub hockey_stick: usize,
    pub failures: Vec<String>,
}

impl IdentityReport {
    pub fn checked(&self) -> usize {
        self.identity_i + self.identity_ii + self.identity_iii + self.hockey_stick
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates every identity across `grid` and records any disagreement.
pub fn check_identity_grid(grid: IdentityGrid) -> IdentityReport {
    let mut report = IdentityReport::default();
    for n in 1..=grid.max_n {
        for k in 1..=n {
            for b in 1..=k {
                let (lhs, rhs) = identity_i_sides(n, k, b).expect("grid respects range");
                report.identity_i += 1;
                if lhs != rhs {
                    report
                        .failures
                        .push(format!("identity I (N={n}, k={k}, b={b}): {lhs} != {rhs}"));
                }
                let (lhs, rhs) = identity_ii_sides(n, k, b).expect("grid respects range");
                report.identity_ii += 1;
                if lhs != rhs {
                    report
                        .failures
                        .push(format!("identity II (N={n}, k={k}, b={b}): {lhs} != {rhs}"));
                }
            }
        }
    }
    for a in 0..=grid.max_ab {
        for b in 0..=grid.max_ab {
            for k in 0..=grid.max_k {
                let (lhs, rhs) = identity_iii_sides(a, b, k);
                report.identity_iii += 1;
                if lhs != rhs {
                    report.failures.push(format!(
                        "identity III (a={a}, b={b}, k={k}): {lhs} != {rhs}"
                    ));
                }
            }
        }
    }
    for n in 0..=grid.max_hockey {
        for r in 0..=n {
            let (lhs, rhs) = hockey_stick_sides(n, r).expect("grid respects range");
            report.hockey_stick += 1;
            if lhs != rhs {
                report
                    .failures
                    .push(format!("hockey stick (n={n}, r={r}): {lhs} != {rhs}"));
            }
        }
    }
    report
}
