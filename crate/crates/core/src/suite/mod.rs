// SPDX-License-Identifier: MIT OR Apache-2.0

//! Suite configuration, dataset files, prediction ingestion and reports.

pub mod commands;
pub mod io;
pub mod predictions;
pub mod report;

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineSpec;
use crate::dataset::DatasetSpec;
use crate::error::{Error, Result};
use crate::eval::ORACLE_ID;
use crate::series::{split_baseline, EvalProtocol};

pub use commands::{cmd_emit_plot_data, cmd_emit_predictions, cmd_evaluate, cmd_generate};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Prefix selecting a bundled suite instead of a file.
pub const BUILTIN_PREFIX: &str = "builtin:";

/// Name that expands to every bundled suite.
pub const DEFAULT_SUITE: &str = "default";

const BUILTIN: [(&str, &str); 11] = [
    ("trend", include_str!("../../suites/trend.toml")),
    ("periodic", include_str!("../../suites/periodic.toml")),
    ("noise", include_str!("../../suites/noise.toml")),
    (
        "noise_distributions",
        include_str!("../../suites/noise_distributions.toml"),
    ),
    ("anomaly", include_str!("../../suites/anomaly.toml")),
    ("dependency", include_str!("../../suites/dependency.toml")),
    (
        "cross_variable",
        include_str!("../../suites/cross_variable.toml"),
    ),
    ("length", include_str!("../../suites/length.toml")),
    (
        "complex_univariate",
        include_str!("../../suites/complex_univariate.toml"),
    ),
    (
        "complex_multivariate",
        include_str!("../../suites/complex_multivariate.toml"),
    ),
    (
        "long_dependency",
        include_str!("../../suites/long_dependency.toml"),
    ),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Emit `radar.csv` with difficulty scores across datasets.
    #[serde(default)]
    pub radar: bool,
    #[serde(default)]
    pub protocol: EvalProtocol,
    #[serde(default)]
    pub baselines: Vec<BaselineSpec>,
    pub datasets: Vec<DatasetSpec>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

impl SuiteConfig {
    /// Parses and validates; `origin` names the source in diagnostics.
    pub fn from_toml_str(src: &str, origin: &str) -> Result<Self> {
        let cfg: SuiteConfig =
            toml::from_str(src).map_err(|e| Error::Config(format!("{origin}: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&src, &path.display().to_string())
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let src = builtin_source(name)?;
        Self::from_toml_str(src, &format!("{BUILTIN_PREFIX}{name}"))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self)
            .map_err(|e| Error::Config(format!("cannot serialize suite `{}`: {e}", self.name)))
    }

    pub fn validate(&self) -> Result<()> {
        if !valid_id(&self.name) {
            return Err(Error::Config(format!(
                "suite name `{}` must use [A-Za-z0-9_.-]",
                self.name
            )));
        }
        self.protocol
            .validate()
            .map_err(|e| Error::Config(format!("suite `{}` protocol: {e}", self.name)))?;
        let mut names = BTreeSet::new();
        for b in &self.baselines {
            b.validate().map_err(|e| {
                Error::Config(format!(
                    "suite `{}` baseline `{}`: {e}",
                    self.name,
                    b.name()
                ))
            })?;
            if !names.insert(b.name()) {
                return Err(Error::Config(format!(
                    "suite `{}` lists baseline `{}` twice",
                    self.name,
                    b.name()
                )));
            }
        }
        if self.datasets.is_empty() {
            return Err(Error::Config(format!(
                "suite `{}` has no datasets",
                self.name
            )));
        }
        let mut ids = BTreeSet::new();
        for d in &self.datasets {
            if !valid_id(&d.id) {
                return Err(Error::Config(format!(
                    "dataset id `{}` must use [A-Za-z0-9_.-]",
                    d.id
                )));
            }
            if !ids.insert(d.id.as_str()) {
                return Err(Error::Config(format!("duplicate dataset id `{}`", d.id)));
            }
        }
        if let Some(d) = self.datasets.iter().find(|d| {
            d.id.strip_suffix("_clean")
                .is_some_and(|base| ids.contains(base))
        }) {
            return Err(Error::Config(format!(
                "dataset id `{}` collides with the clean file of `{}`",
                d.id,
                d.id.trim_end_matches("_clean")
            )));
        }
        Ok(())
    }

    /// [`SuiteConfig::validate`] plus a check that every dataset is long
    /// enough for the fit and evaluation partitions at the largest horizon.
    pub fn validate_evaluable(&self) -> Result<()> {
        self.validate()?;
        for d in &self.datasets {
            split_baseline(d.n, &self.protocol)
                .map_err(|e| Error::Config(format!("dataset `{}` (n = {}): {e}", d.id, d.n)))?;
        }
        Ok(())
    }

    /// Adds `offset` to every dataset seed. Datasets sharing a seed keep sharing it.
    pub fn apply_seed_override(&mut self, offset: u64) {
        for d in &mut self.datasets {
            d.seed = d.seed.wrapping_add(offset);
        }
    }

    pub fn baseline_names(&self) -> Vec<String> {
        self.baselines.iter().map(BaselineSpec::name).collect()
    }

    /// Whether `model` clashes with the oracle or a configured baseline.
    pub fn is_reserved_model(&self, model: &str) -> bool {
        model == ORACLE_ID || self.baselines.iter().any(|b| b.name() == model)
    }
}

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

pub fn builtin_source(name: &str) -> Result<&'static str> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown builtin suite `{name}`; available: {}, {DEFAULT_SUITE}",
                builtin_names().join(", ")
            ))
        })
}

/// Resolves a `--suite` argument: a file path, `builtin:<name>`, or
/// `builtin:default` for every bundled suite.
pub fn resolve_suites(arg: &str) -> Result<Vec<SuiteConfig>> {
    match arg.strip_prefix(BUILTIN_PREFIX) {
        Some(DEFAULT_SUITE) => builtin_names()
            .into_iter()
            .map(SuiteConfig::builtin)
            .collect(),
        Some(name) => Ok(vec![SuiteConfig::builtin(name)?]),
        None => Ok(vec![SuiteConfig::from_path(Path::new(arg))?]),
    }
}
