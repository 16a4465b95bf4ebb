use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground-truth serial ranges: factory `i` owns `sizes[i]` consecutive serials
/// and is followed by `gaps[i]` unused ones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayoutSpec", into = "LayoutSpec")]
pub struct FactoryLayout {
    sizes: Vec<u64>,
    gaps: Vec<u64>,
    first_start: u64,
    /// Inclusive `(start, end)` per factory.
    intervals: Vec<(u64, u64)>,
    /// `offsets[i]` is the number of serials in factories before `i`.
    offsets: Vec<u64>,
    total: u64,
}

/// Serialized form of a layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSpec {
    pub sizes: Vec<u64>,
    #[serde(default)]
    pub gaps: Vec<u64>,
    #[serde(default = "default_start")]
    pub first_start: u64,
}

fn default_start() -> u64 {
    1
}

impl TryFrom<LayoutSpec> for FactoryLayout {
    type Error = Error;

    fn try_from(spec: LayoutSpec) -> Result<Self> {
        build_layout(spec.sizes, spec.gaps, spec.first_start)
    }
}

impl From<FactoryLayout> for LayoutSpec {
    fn from(layout: FactoryLayout) -> Self {
        LayoutSpec {
            sizes: layout.sizes,
            gaps: layout.gaps,
            first_start: layout.first_start,
        }
    }
}

/// Lays factories out left to right: `start_1 = first_start`,
/// `start_{i+1} = end_i + gap_i + 1`.
pub fn build_layout(sizes: Vec<u64>, gaps: Vec<u64>, first_start: u64) -> Result<FactoryLayout> {
    if sizes.is_empty() || gaps.len() + 1 != sizes.len() {
        return Err(Error::DimensionMismatch {
            sizes: sizes.len(),
            gaps: gaps.len(),
            expected: sizes.len().saturating_sub(1),
        });
    }
    if let Some(index) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::NonPositiveSize { index });
    }
    if first_start == 0 {
        return Err(Error::InvalidStart);
    }
    let overflow = || Error::InvalidConfig("layout serials overflow u64".into());
    let mut intervals = Vec::with_capacity(sizes.len());
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut start = first_start;
    let mut total = 0u64;
    for (i, &size) in sizes.iter().enumerate() {
        let end = start.checked_add(size - 1).ok_or_else(overflow)?;
        intervals.push((start, end));
        offsets.push(total);
        total = total.checked_add(size).ok_or_else(overflow)?;
        if let Some(&gap) = gaps.get(i) {
            start = end
                .checked_add(gap)
                .and_then(|s| s.checked_add(1))
                .ok_or_else(overflow)?;
        }
    }
    Ok(FactoryLayout {
        sizes,
        gaps,
        first_start,
        intervals,
        offsets,
        total,
    })
}

impl FactoryLayout {
    /// The classical universe `{1..n}`.
    pub fn single(n: u64) -> Result<Self> {
        build_layout(vec![n], vec![], 1)
    }

    /// `l` factories of size `n` separated by gaps of `gap`, starting at 1.
    pub fn uniform(l: usize, n: u64, gap: u64) -> Result<Self> {
        build_layout(vec![n; l], vec![gap; l.saturating_sub(1)], 1)
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn gaps(&self) -> &[u64] {
        &self.gaps
    }

    pub fn first_start(&self) -> u64 {
        self.first_start
    }

    pub fn intervals(&self) -> &[(u64, u64)] {
        &self.intervals
    }

    pub fn factories(&self) -> usize {
        self.sizes.len()
    }

    /// `N_tot`, the number of valid serials.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Distance from the first serial of the first factory to the last serial
    /// of the last, counted inclusively: `Σ sizes + Σ gaps`.
    pub fn span(&self) -> u64 {
        self.total + self.gaps.iter().sum::<u64>()
    }

    /// `(N, G)` when every factory has the same size and every gap the same
    /// width (a single factory reports a gap of 0).
    pub fn uniform_params(&self) -> Option<(u64, u64)> {
        let n = self.sizes[0];
        let g = self.gaps.first().copied().unwrap_or(0);
        (self.sizes.iter().all(|&s| s == n) && self.gaps.iter().all(|&x| x == g)).then_some((n, g))
    }

    /// The `index`-th valid serial (0-based) in increasing order.
    pub fn serial_at(&self, index: u64) -> u64 {
        debug_assert!(index < self.total);
        let f = self.offsets.partition_point(|&o| o <= index) - 1;
        self.intervals[f].0 + (index - self.offsets[f])
    }

    /// 0-based factory holding `serial`, if any.
    pub fn factory_of(&self, serial: u64) -> Option<usize> {
        let f = self.intervals.partition_point(|&(s, _)| s <= serial);
        (f > 0 && serial <= self.intervals[f - 1].1).then(|| f - 1)
    }

    pub fn contains(&self, serial: u64) -> bool {
        self.factory_of(serial).is_some()
    }

    /// Every valid serial in increasing order.
    pub fn serials(&self) -> impl Iterator<Item = u64> + '_ {
        self.intervals.iter().flat_map(|&(s, e)| s..=e)
    }
}
