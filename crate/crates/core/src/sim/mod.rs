//! Ground-truth layouts, uniform sampling without replacement, the Monte Carlo
//! MSE harness and the exhaustive enumeration oracle.

mod layout;
mod oracle;
mod sampler;
mod simulate;

pub use layout::{build_layout, FactoryLayout, LayoutSpec};
pub use oracle::{enumerate_oracle, enumerate_with, OracleResult, Statistic, DEFAULT_BUDGET};
pub use sampler::{draw_sample, trial_rng};
pub use simulate::{run_mse, EstimatorKind, KRange, MseRow, SimulationConfig, SimulationReport};
