//! Serial-number estimation for one or several factories.
//!
//! The crate covers the classical estimator from the sample maximum, its
//! unknown-minimum counterpart built on the sample spread, a total-production
//! estimator for several factories separated by unknown gaps, and estimators
//! for equal factories separated by a known fixed gap. Alongside them sit the
//! exact quantities used to validate them: binomial identities, spread and
//! maximum distributions, the probability that a sample misses a factory, and
//! an exhaustive enumeration oracle. [`sim`] runs seeded Monte Carlo
//! experiments that score any estimator by mean squared error.
//!
//! ```
//! use tankstat::{estimators::gtp_estimate, Sample};
//!
//! let sample = Sample::new(vec![2, 5, 9]).unwrap();
//! assert_eq!(gtp_estimate(&sample).value, 11.0);
//! ```

pub mod combinatorics;
mod error;
mod estimate;
pub mod estimators;
pub mod fixed_gap;
pub mod mfp;
pub mod miss_probability;
mod sample;
pub mod sim;

pub use error::{Error, Result};
pub use estimate::{Diagnostics, Estimate, FixedGapDiagnostics, Method};
pub use num_bigint::{BigInt, BigUint};
pub use num_rational::BigRational;
pub use sample::Sample;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/single-factory.md")]
    mod single_factory {}
    #[doc = include_str!("../../../book/src/multiple-factories.md")]
    mod multiple_factories {}
    #[doc = include_str!("../../../book/src/missing-factories.md")]
    mod missing_factories {}
    #[doc = include_str!("../../../book/src/fixed-gap.md")]
    mod fixed_gap {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
