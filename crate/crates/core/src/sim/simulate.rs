use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::layout::FactoryLayout;
use super::sampler::{draw_sample, trial_rng};
use crate::error::{Error, Result};
use crate::estimators::{gtp_estimate, gtp_um_estimate};
use crate::fixed_gap::{fixed_gap_estimate, fixed_gap_estimate_k1};
use crate::mfp::mfp_estimate;
use crate::sample::Sample;

/// Estimator applied to every simulated sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EstimatorKind {
    Mfp,
    MfpMinUnknown,
    FixedGap,
    FixedGapK1,
    Gtp,
    GtpUm,
}

impl EstimatorKind {
    fn is_fixed_gap(self) -> bool {
        matches!(self, EstimatorKind::FixedGap | EstimatorKind::FixedGapK1)
    }

    /// Applies the estimator to one sample drawn from `layout`.
    pub fn apply(self, sample: &Sample, layout: &FactoryLayout) -> Result<f64> {
        let l = layout.factories();
        let fixed = || {
            layout.uniform_params().map(|(_, g)| g).ok_or_else(|| {
                Error::InvalidConfig("fixed-gap estimators need a uniform layout".into())
            })
        };
        let value = match self {
            EstimatorKind::Mfp => mfp_estimate(sample, l, true)?.value,
            EstimatorKind::MfpMinUnknown => mfp_estimate(sample, l, false)?.value,
            EstimatorKind::FixedGap => {
                fixed_gap_estimate(l as u64, fixed()?, sample.len() as u64, sample.max())?.value
            }
            EstimatorKind::FixedGapK1 => {
                fixed_gap_estimate_k1(l as u64, fixed()?, sample.max()).value
            }
            EstimatorKind::Gtp => gtp_estimate(sample).value,
            EstimatorKind::GtpUm => gtp_um_estimate(sample)?.value,
        };
        Ok(value)
    }
}

/// Inclusive `min..=max` by `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KRange {
    pub min: u64,
    pub max: u64,
    #[serde(default = "one")]
    pub step: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    config_id: Option<String>,
    layout: FactoryLayout,
    estimator: EstimatorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_values: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k_range: Option<KRange>,
    trials: u64,
    seed: u64,
}

/// A Monte Carlo experiment: one layout, one estimator, a set of sample sizes.
///
/// In JSON, sample sizes are given either as `k_values: [...]` or as
/// `k_range: {min, max, step}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct SimulationConfig {
    pub config_id: String,
    pub layout: FactoryLayout,
    pub estimator: EstimatorKind,
    /// Sorted, duplicate-free.
    pub k_values: Vec<u64>,
    pub trials: u64,
    pub seed: u64,
}

impl TryFrom<RawConfig> for SimulationConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        let k_values = match (raw.k_values, raw.k_range) {
            (Some(values), None) => values,
            (None, Some(r)) => {
                if r.step == 0 || r.min > r.max {
                    return Err(Error::InvalidConfig(format!("bad k_range {r:?}")));
                }
                (r.min..=r.max).step_by(r.step as usize).collect()
            }
            _ => {
                return Err(Error::InvalidConfig(
                    "give exactly one of k_values and k_range".into(),
                ))
            }
        };
        SimulationConfig::new(
            raw.config_id.unwrap_or_else(|| "config".into()),
            raw.layout,
            raw.estimator,
            k_values,
            raw.trials,
            raw.seed,
        )
    }
}

impl From<SimulationConfig> for RawConfig {
    fn from(c: SimulationConfig) -> Self {
        RawConfig {
            config_id: Some(c.config_id),
            layout: c.layout,
            estimator: c.estimator,
            k_values: Some(c.k_values),
            k_range: None,
            trials: c.trials,
            seed: c.seed,
        }
    }
}

impl SimulationConfig {
    pub fn new(
        config_id: impl Into<String>,
        layout: FactoryLayout,
        estimator: EstimatorKind,
        mut k_values: Vec<u64>,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        k_values.sort_unstable();
        k_values.dedup();
        if k_values.is_empty() {
            return Err(Error::InvalidConfig("no sample sizes given".into()));
        }
        if let Some(&k) = k_values.iter().find(|&&k| k < 1 || k > layout.total()) {
            return Err(Error::InvalidConfig(format!(
                "sample size {k} outside 1..={}",
                layout.total()
            )));
        }
        if trials < 1 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if estimator.is_fixed_gap()
            && (layout.uniform_params().is_none() || layout.first_start() != 1)
        {
            return Err(Error::InvalidConfig(
                "fixed-gap estimators need equal sizes, equal gaps and serials starting at 1"
                    .into(),
            ));
        }
        if matches!(estimator, EstimatorKind::Mfp | EstimatorKind::MfpMinUnknown)
            && layout.factories() < 2
        {
            return Err(Error::InvalidConfig(
                "multiple-factory estimators need at least two factories".into(),
            ));
        }
        Ok(SimulationConfig {
            config_id: config_id.into(),
            layout,
            estimator,
            k_values,
            trials,
            seed,
        })
    }

    /// The quantity estimates are scored against: the common factory size for
    /// the fixed-gap estimators, total production otherwise.
    pub fn target(&self) -> f64 {
        if self.estimator.is_fixed_gap() {
            self.layout.sizes()[0] as f64
        } else {
            self.layout.total() as f64
        }
    }
}

/// Per-`k` Monte Carlo summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseRow {
    pub config_id: String,
    pub k: u64,
    pub trials: u64,
    /// Trials whose estimator rejected the sample; left out of every average.
    pub excluded: u64,
    pub mean_estimate: f64,
    pub bias: f64,
    pub mse: f64,
    /// `mse / target²`, comparable across targets of different scale.
    pub mse_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub config_id: String,
    pub seed: u64,
    pub target: f64,
    pub rows: Vec<MseRow>,
    pub config: SimulationConfig,
}

/// Runs `trials` independent draws per sample size and scores the estimator.
///
/// Trials run in parallel, but each trial's generator is keyed by
/// `(seed, k, trial)` and sums are accumulated in trial order, so the report is
/// identical for any thread count.
pub fn run_mse(config: &SimulationConfig) -> Result<SimulationReport> {
    let layout = &config.layout;
    let target = config.target();
    let trials = config.trials;
    let jobs: Vec<(u64, u64)> = config
        .k_values
        .iter()
        .flat_map(|&k| (0..trials).map(move |t| (k, t)))
        .collect();
    let outcomes: Vec<Option<f64>> = jobs
        .par_iter()
        .map(|&(k, t)| {
            let mut rng = trial_rng(config.seed, k, t);
            let sample = draw_sample(layout, k, &mut rng).expect("k validated against layout");
            config.estimator.apply(&sample, layout).ok()
        })
        .collect();

    let rows = config
        .k_values
        .iter()
        .zip(outcomes.chunks(trials as usize))
        .map(|(&k, chunk)| {
            let values: Vec<f64> = chunk.iter().flatten().copied().collect();
            let used = values.len() as f64;
            let mean = values.iter().sum::<f64>() / used;
            let mse = values.iter().map(|v| (v - target).powi(2)).sum::<f64>() / used;
            MseRow {
                config_id: config.config_id.clone(),
                k,
                trials,
                excluded: trials - values.len() as u64,
                mean_estimate: mean,
                bias: mean - target,
                mse,
                mse_normalized: mse / (target * target),
            }
        })
        .collect();

    Ok(SimulationReport {
        config_id: config.config_id.clone(),
        seed: config.seed,
        target,
        rows,
        config: config.clone(),
    })
}
