//! Experiment runner for the estimators in `tcps_core`: configuration,
//! matched-budget comparisons, sweeps, resource tables and CSV/JSON reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod stats;

pub use config::{ExperimentConfig, RawConfig};
pub use error::{HarnessError, Result};
pub use experiments::run;
pub use report::Report;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/harness.md")]
    pub mod harness {}
}
