// SPDX-License-Identifier: MIT OR Apache-2.0

//! The operations behind the CLI subcommands.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::baselines::FittedBaseline;
use crate::dataset::{generate_dataset, DatasetSpec, SyntheticDataset};
use crate::error::{Error, Result};
use crate::eval::{evaluate_builtin, EvalContext, ORACLE_ID};
use crate::oracle::PreparedOracle;

use super::io::{observed_name, verify_dataset, write_atomic, write_dataset};
use super::predictions::{prediction_csv, PredictionSet};
use super::report::{
    degradation_csv, degradation_rows, plot_csv, plot_rows, radar, radar_csv, read_report_csv,
    report_csv, DatasetReport, SuiteReport,
};
use super::{SuiteConfig, ARTIFACT_VERSION};

pub const SUITE_FILE: &str = "suite.toml";
pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";
pub const RADAR_CSV: &str = "radar.csv";
pub const DEGRADATION_CSV: &str = "degradation.csv";
pub const PLOT_CSV: &str = "plot_data.csv";

/// Writes every dataset of `cfg` plus the resolved `suite.toml` into `out`.
pub fn cmd_generate(cfg: &SuiteConfig, out: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    let per_dataset: Vec<Vec<PathBuf>> = cfg
        .datasets
        .par_iter()
        .map(|spec| {
            let ds = generate_dataset(spec).map_err(|e| with_dataset(&spec.id, e))?;
            write_dataset(out, &ds, &cfg.protocol)
        })
        .collect::<Result<_>>()?;
    let suite_path = out.join(SUITE_FILE);
    write_atomic(&suite_path, cfg.to_toml()?.as_bytes())?;
    let mut files: Vec<PathBuf> = per_dataset.into_iter().flatten().collect();
    files.push(suite_path);
    Ok(files)
}

fn with_dataset(id: &str, e: Error) -> Error {
    match e {
        Error::Param(m) => Error::Param(format!("dataset `{id}`: {m}")),
        Error::Domain(m) => Error::Domain(format!("dataset `{id}`: {m}")),
        other => other,
    }
}

fn evaluate_one(
    cfg: &SuiteConfig,
    ds: &SyntheticDataset,
    predictions: &PredictionSet,
) -> Result<DatasetReport> {
    let (mut models, skipped) = evaluate_builtin(ds, &cfg.protocol, &cfg.baselines)?;
    let ctx = EvalContext::new(&ds.series, &cfg.protocol)?;
    for model in predictions.models_for(ds.id()) {
        let table = predictions.table(ds.id(), model, &ctx)?;
        let f = |origin: usize, h: usize| table.get(origin, h);
        models.push(ctx.evaluate(model, &f)?);
    }
    models.sort_by(|a, b| a.model.cmp(&b.model));
    Ok(DatasetReport {
        id: ds.id().to_string(),
        channels: ds.series.channel_names().to_vec(),
        oracle_classes: ds.classes.clone(),
        models,
        skipped_baselines: skipped,
    })
}

fn same_except_id(a: &DatasetSpec, b: &DatasetSpec) -> bool {
    let mut b = b.clone();
    b.id.clone_from(&a.id);
    *a == b
}

/// Scores the oracle, the configured baselines and any external predictions
/// on every dataset, then writes the report files into `out`. Dataset files
/// already present in `out` must match their regeneration.
pub fn cmd_evaluate(
    cfg: &SuiteConfig,
    out: &Path,
    prediction_files: &[PathBuf],
) -> Result<SuiteReport> {
    cfg.validate_evaluable()?;
    let predictions = PredictionSet::load(prediction_files)?;
    for d in predictions.datasets() {
        if !cfg.datasets.iter().any(|s| s.id == d) {
            return Err(Error::IndexMismatch(format!(
                "predictions name unknown dataset `{d}`"
            )));
        }
        if let Some(m) = predictions
            .models_for(d)
            .into_iter()
            .find(|m| cfg.is_reserved_model(m))
        {
            return Err(Error::Config(format!(
                "external model id `{m}` clashes with a built-in model"
            )));
        }
    }
    let mut datasets: Vec<DatasetReport> = cfg
        .datasets
        .par_iter()
        .map(|spec| {
            let ds = generate_dataset(spec).map_err(|e| with_dataset(&spec.id, e))?;
            if out.join(observed_name(&spec.id)).exists() {
                verify_dataset(out, &ds)?;
            }
            evaluate_one(cfg, &ds, &predictions)
        })
        .collect::<Result<_>>()?;
    datasets.sort_by(|a, b| a.id.cmp(&b.id));

    let mut degradation = Vec::new();
    for spec in cfg.datasets.iter().filter(|s| !s.anomalies.is_empty()) {
        let twin_spec = spec.clean_twin();
        let report = datasets
            .iter()
            .find(|d| d.id == spec.id)
            .expect("every dataset was evaluated");
        let twin = match cfg.datasets.iter().find(|s| same_except_id(&twin_spec, s)) {
            Some(s) => datasets
                .iter()
                .find(|d| d.id == s.id)
                .expect("every dataset was evaluated")
                .clone(),
            None => {
                let mut t = twin_spec.clone();
                t.id = format!("{}.clean_twin", spec.id);
                evaluate_one(cfg, &generate_dataset(&t)?, &PredictionSet::default())?
            }
        };
        degradation.extend(degradation_rows(report, &twin));
    }

    let (radar_rows, radar_skipped) = if cfg.radar {
        let (r, s) = radar(&datasets)?;
        (Some(r), s)
    } else {
        (None, Vec::new())
    };
    let report = SuiteReport {
        suite: cfg.name.clone(),
        artifact_version: ARTIFACT_VERSION.to_string(),
        protocol: cfg.protocol.clone(),
        datasets,
        radar: radar_rows,
        radar_skipped,
        degradation: (!degradation.is_empty()).then_some(degradation),
    };
    write_atomic(&out.join(REPORT_CSV), &report_csv(&report.rows())?)?;
    write_atomic(&out.join(REPORT_JSON), &report.json()?)?;
    if let Some(r) = &report.radar {
        write_atomic(&out.join(RADAR_CSV), &radar_csv(r)?)?;
    }
    if let Some(d) = &report.degradation {
        write_atomic(&out.join(DEGRADATION_CSV), &degradation_csv(d)?)?;
    }
    Ok(report)
}

/// Converts `report.csv` to long format at `out`.
pub fn cmd_emit_plot_data(report: &Path, out: &Path) -> Result<PathBuf> {
    let rows = read_report_csv(report)?;
    write_atomic(out, &plot_csv(&plot_rows(&rows))?)?;
    Ok(out.to_path_buf())
}

/// Writes the forecasts of the oracle or a configured baseline as prediction
/// files, one per dataset, labelled `label` in the model column.
pub fn cmd_emit_predictions(
    cfg: &SuiteConfig,
    model: &str,
    label: &str,
    out: &Path,
) -> Result<Vec<PathBuf>> {
    cfg.validate_evaluable()?;
    if model != ORACLE_ID && !cfg.baselines.iter().any(|b| b.name() == model) {
        return Err(Error::Config(format!(
            "model `{model}` is neither `{ORACLE_ID}` nor a baseline of suite `{}` ({})",
            cfg.name,
            cfg.baseline_names().join(", ")
        )));
    }
    cfg.datasets
        .par_iter()
        .map(|spec| {
            let ds = generate_dataset(spec)?;
            let ctx = EvalContext::new(&ds.series, &cfg.protocol)?;
            let bytes = if model == ORACLE_ID {
                let o = PreparedOracle::new(&ds.series, &ds.classes, ds.system.as_ref())?;
                prediction_csv(ds.id(), label, &ctx, &|origin, h| o.forecast(origin, h))?
            } else {
                let spec = cfg
                    .baselines
                    .iter()
                    .find(|b| b.name() == model)
                    .expect("checked above");
                let b = FittedBaseline::fit(spec, &ds.series, ctx.fit_range())?;
                prediction_csv(ds.id(), label, &ctx, &|origin, h| b.forecast(origin, h))?
            };
            let path = out.join(format!("{}__{label}.csv", ds.id()));
            write_atomic(&path, &bytes)?;
            Ok(path)
        })
        .collect()
}
