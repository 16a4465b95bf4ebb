use serde::Serialize;

use crate::mfp::MfpSplit;

/// Which estimator produced an [`Estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Gtp,
    GtpUm,
    Mfp,
    FixedGapExactK1,
    FixedGapApprox,
    /// Numerical inversion of the exact expected maximum.
    FixedGapInverted,
}

/// Method-specific detail attached to an estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Diagnostics {
    Mfp(MfpSplit),
    FixedGap(FixedGapDiagnostics),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedGapDiagnostics {
    /// `max(value, k)`: the raw estimate can fall below the number of
    /// distinct serials observed, this never does.
    pub clamped: f64,
    /// Sample count used by the estimator.
    pub k: u64,
}

/// A real-valued estimate. Values are never rounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl Estimate {
    pub(crate) fn plain(value: f64, method: Method) -> Self {
        debug_assert!(value.is_finite());
        Estimate {
            value,
            method,
            diagnostics: None,
        }
    }

    pub fn mfp_split(&self) -> Option<&MfpSplit> {
        match &self.diagnostics {
            Some(Diagnostics::Mfp(split)) => Some(split),
            _ => None,
        }
    }
}
