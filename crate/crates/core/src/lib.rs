// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seedable synthetic time-series benchmark engine.
//!
//! Every generated series carries its observed values alongside the clean,
//! predictable part, so forecasts can be scored against both.

pub mod baselines;
pub mod corruption;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod metrics;
pub mod multivar;
pub mod oracle;
pub mod rng;
pub mod series;
pub mod signal;
pub mod stochastic;
pub mod suite;

pub use dataset::{generate_dataset, DatasetSpec, GeneratorSpec, SyntheticDataset};
pub use error::{Error, Result};
pub use oracle::OracleClass;
pub use series::{EvalProtocol, TimeSeries};
