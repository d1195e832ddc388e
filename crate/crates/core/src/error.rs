// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("partition `{partition}` has {len} steps but needs at least {needed}")]
    PartitionTooSmall {
        partition: &'static str,
        len: usize,
        needed: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("AR polynomial is not stationary (largest companion root modulus {modulus:.6})")]
    NonStationary { modulus: f64 },

    #[error("MA polynomial is not invertible (largest companion root modulus {modulus:.6})")]
    NonInvertible { modulus: f64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("signal variance is zero; SNR is undefined")]
    ZeroVarianceSignal,

    #[error("cannot place {count} disjoint pulses of width {width} in a region of {region} steps")]
    RegionOverflow {
        count: usize,
        width: usize,
        region: usize,
    },

    #[error("ODE step too large: state became {state} at step {step}")]
    StepTooLarge { step: usize, state: String },

    #[error("unknown recipe `{0}`")]
    UnknownRecipe(String),

    #[error("innovation reconstruction diverged at index {index}")]
    InnovationReconstructionFailure { index: usize },

    #[error("insufficient history: need {needed} steps, have {available}")]
    InsufficientHistory { needed: usize, available: usize },

    #[error("autocovariance matrix is singular (constant or degenerate series)")]
    SingularAutocovariance,

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("mse of the clean run is zero; degradation is undefined")]
    ZeroCleanMse,

    #[error("horizon {0} missing from report rows")]
    MissingHorizon(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("prediction file for dataset `{dataset}`, model `{model}`, horizon {horizon} is missing window starting at {start}")]
    MissingWindow {
        dataset: String,
        model: String,
        horizon: usize,
        start: usize,
    },

    #[error("index mismatch: {0}")]
    IndexMismatch(String),

    #[error("data mismatch: {0}")]
    DataMismatch(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI: 2 config, 3 data/prediction mismatch, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 4,
            Error::MissingWindow { .. }
            | Error::IndexMismatch(_)
            | Error::DataMismatch(_)
            | Error::ShapeMismatch { .. }
            | Error::LengthMismatch { .. } => 3,
            _ => 2,
        }
    }
}
