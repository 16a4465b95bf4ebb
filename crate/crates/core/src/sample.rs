use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A duplicate-free set of observed serial numbers, kept in increasing order.
///
/// Always non-empty, so the maximum, minimum and spread are always defined.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Sample {
    serials: Vec<u64>,
}

impl Sample {
    /// Builds a sample from serials in any order. Rejects empty input, zero and
    /// duplicates.
    pub fn new(mut serials: Vec<u64>) -> Result<Self> {
        serials.sort_unstable();
        if let Some(w) = serials.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateSerial(w[0]));
        }
        Self::check_nonempty_positive(&serials)?;
        Ok(Sample { serials })
    }

    /// Builds a sample from serials that must already be strictly increasing.
    pub fn from_sorted(serials: Vec<u64>) -> Result<Self> {
        if serials.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotSorted);
        }
        Self::check_nonempty_positive(&serials)?;
        Ok(Sample { serials })
    }

    fn check_nonempty_positive(serials: &[u64]) -> Result<()> {
        match serials.first() {
            None => Err(Error::EmptySample),
            Some(&0) => Err(Error::NonPositiveSerial(0)),
            Some(_) => Ok(()),
        }
    }

    pub fn serials(&self) -> &[u64] {
        &self.serials
    }

    pub fn len(&self) -> usize {
        self.serials.len()
    }

    /// Always false; a `Sample` holds at least one serial.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn max(&self) -> u64 {
        *self.serials.last().expect("non-empty")
    }

    pub fn min(&self) -> u64 {
        self.serials[0]
    }

    pub fn spread(&self) -> u64 {
        self.max() - self.min()
    }

    /// Every serial moved up by `offset`.
    pub fn shifted(&self, offset: u64) -> Sample {
        Sample {
            serials: self.serials.iter().map(|s| s + offset).collect(),
        }
    }

    /// Consecutive differences `x(i+1) - x(i)`; empty for a singleton.
    pub fn gaps(&self) -> Vec<u64> {
        self.serials.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Contiguous run `range` of the ordered serials as its own sample.
    pub(crate) fn slice(&self, range: std::ops::Range<usize>) -> Sample {
        debug_assert!(!range.is_empty());
        Sample {
            serials: self.serials[range].to_vec(),
        }
    }
}

impl TryFrom<Vec<u64>> for Sample {
    type Error = Error;

    fn try_from(serials: Vec<u64>) -> Result<Self> {
        Sample::new(serials)
    }
}

impl From<Sample> for Vec<u64> {
    fn from(sample: Sample) -> Self {
        sample.serials
    }
}
