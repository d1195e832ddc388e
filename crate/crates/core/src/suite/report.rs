// SPDX-License-Identifier: MIT OR Apache-2.0

//! Report tables: `report.csv`, `report.json`, `radar.csv`,
//! `degradation.csv` and long-format plot data.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{ModelEval, SkippedBaseline};
use crate::metrics::{degradation, difficulty_scores, MetricRow};
use crate::oracle::OracleClass;
use crate::series::EvalProtocol;

use super::io::{csv_bytes, csv_err, csv_writer, fmt_f64};

pub const REPORT_COLUMNS: [&str; 10] = [
    "dataset",
    "model",
    "horizon",
    "window_count",
    "mse_obs",
    "mse_true",
    "mae",
    "rmse",
    "mape",
    "smape",
];

pub const PLOT_COLUMNS: [&str; 5] = ["dataset", "model", "horizon", "metric", "value"];

/// A horizon in steps, or the mean over the protocol's horizons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HorizonKey {
    Steps(usize),
    Mean,
}

impl fmt::Display for HorizonKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HorizonKey::Steps(h) => write!(f, "{h}"),
            HorizonKey::Mean => f.write_str("mean"),
        }
    }
}

impl FromStr for HorizonKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "mean" {
            return Ok(HorizonKey::Mean);
        }
        s.parse()
            .map(HorizonKey::Steps)
            .map_err(|_| Error::DataMismatch(format!("`{s}` is not a horizon")))
    }
}

/// One line of `report.csv`, with values kept as written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub dataset: String,
    pub model: String,
    pub horizon: HorizonKey,
    /// `window_count` then the metric columns; empty when absent.
    pub values: Vec<String>,
}

impl ReportRow {
    fn key(&self) -> (&str, &str, HorizonKey) {
        (&self.dataset, &self.model, self.horizon)
    }

    fn metric_names() -> &'static [&'static str] {
        &REPORT_COLUMNS[3..]
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn row_values(window_count: Option<usize>, r: &MetricRow) -> Vec<String> {
    let mut v = vec![window_count.map(|w| w.to_string()).unwrap_or_default()];
    v.extend(r.values().into_iter().map(opt));
    v
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub id: String,
    pub channels: Vec<String>,
    pub oracle_classes: Vec<OracleClass>,
    pub models: Vec<ModelEval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped_baselines: Vec<SkippedBaseline>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadarRow {
    pub model: String,
    pub dataset: String,
    pub mse: f64,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegradationRow {
    pub dataset: String,
    pub twin: String,
    pub model: String,
    pub mse_anomaly: f64,
    pub mse_clean: f64,
    /// Absent when the clean twin's MSE is zero.
    pub degradation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Note {
    pub model: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub artifact_version: String,
    pub protocol: EvalProtocol,
    pub datasets: Vec<DatasetReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radar: Option<Vec<RadarRow>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radar_skipped: Vec<Note>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degradation: Option<Vec<DegradationRow>>,
}

impl SuiteReport {
    pub fn dataset(&self, id: &str) -> Option<&DatasetReport> {
        self.datasets.iter().find(|d| d.id == id)
    }

    pub fn model(&self, dataset: &str, model: &str) -> Option<&ModelEval> {
        self.dataset(dataset)?
            .models
            .iter()
            .find(|m| m.model == model)
    }

    /// Rows of `report.csv` sorted by dataset, model and horizon.
    pub fn rows(&self) -> Vec<ReportRow> {
        let mut rows = Vec::new();
        for d in &self.datasets {
            for m in &d.models {
                for h in &m.horizons {
                    rows.push(ReportRow {
                        dataset: d.id.clone(),
                        model: m.model.clone(),
                        horizon: HorizonKey::Steps(h.horizon),
                        values: row_values(Some(h.window_count), &h.row),
                    });
                }
                rows.push(ReportRow {
                    dataset: d.id.clone(),
                    model: m.model.clone(),
                    horizon: HorizonKey::Mean,
                    values: row_values(None, &m.aggregate),
                });
            }
        }
        rows.sort_by(|a, b| a.key().cmp(&b.key()));
        rows
    }

    pub fn json(&self) -> Result<Vec<u8>> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Domain(format!("report encode: {e}")))?;
        s.push('\n');
        Ok(s.into_bytes())
    }
}

pub fn report_csv(rows: &[ReportRow]) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    let enc = |e: csv::Error| Error::Domain(format!("csv encode: {e}"));
    w.write_record(REPORT_COLUMNS).map_err(enc)?;
    for r in rows {
        let mut rec = vec![r.dataset.clone(), r.model.clone(), r.horizon.to_string()];
        rec.extend(r.values.iter().cloned());
        w.write_record(&rec).map_err(enc)?;
    }
    csv_bytes(w)
}

pub fn read_report_csv(path: &Path) -> Result<Vec<ReportRow>> {
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.iter().ne(REPORT_COLUMNS) {
        return Err(Error::DataMismatch(format!(
            "{}: unexpected report header",
            path.display()
        )));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            Ok(ReportRow {
                dataset: rec[0].to_string(),
                model: rec[1].to_string(),
                horizon: rec[2].parse()?,
                values: rec.iter().skip(3).map(str::to_string).collect(),
            })
        })
        .collect()
}

/// Long format: one row per (dataset, model, horizon, metric), sorted by key.
pub fn plot_rows(rows: &[ReportRow]) -> Vec<[String; 5]> {
    let mut out: Vec<(String, String, HorizonKey, &str, String)> = Vec::new();
    for r in rows {
        for (name, v) in ReportRow::metric_names().iter().zip(&r.values) {
            out.push((
                r.dataset.clone(),
                r.model.clone(),
                r.horizon,
                name,
                v.clone(),
            ));
        }
    }
    out.sort_by(|a, b| (&a.0, &a.1, a.2, a.3).cmp(&(&b.0, &b.1, b.2, b.3)));
    out.into_iter()
        .map(|(d, m, h, k, v)| [d, m, h.to_string(), k.to_string(), v])
        .collect()
}

pub fn plot_csv(rows: &[[String; 5]]) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    let enc = |e: csv::Error| Error::Domain(format!("csv encode: {e}"));
    w.write_record(PLOT_COLUMNS).map_err(enc)?;
    for r in rows {
        w.write_record(r).map_err(enc)?;
    }
    csv_bytes(w)
}

/// Inverse of [`plot_rows`].
pub fn pivot_plot_rows(rows: &[[String; 5]]) -> Result<Vec<ReportRow>> {
    let names = ReportRow::metric_names();
    let mut grouped: BTreeMap<(String, String, HorizonKey), Vec<Option<String>>> = BTreeMap::new();
    for [d, m, h, k, v] in rows {
        let idx = names
            .iter()
            .position(|n| n == k)
            .ok_or_else(|| Error::DataMismatch(format!("unknown metric `{k}`")))?;
        let slot = grouped
            .entry((d.clone(), m.clone(), h.parse()?))
            .or_insert_with(|| vec![None; names.len()]);
        if slot[idx].replace(v.clone()).is_some() {
            return Err(Error::DataMismatch(format!(
                "duplicate plot row {d}/{m}/{h}/{k}"
            )));
        }
    }
    grouped
        .into_iter()
        .map(|((dataset, model, horizon), vals)| {
            let values = vals
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| {
                        Error::DataMismatch(format!(
                            "{dataset}/{model}/{horizon}: missing `{}`",
                            names[i]
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ReportRow {
                dataset,
                model,
                horizon,
                values,
            })
        })
        .collect()
}

/// Difficulty scores per model across every dataset. A model is left out
/// when it is missing on some dataset or has a zero aggregate MSE.
pub fn radar(datasets: &[DatasetReport]) -> Result<(Vec<RadarRow>, Vec<Note>)> {
    let mut per_model: BTreeMap<&str, BTreeMap<String, f64>> = BTreeMap::new();
    for d in datasets {
        for m in &d.models {
            per_model
                .entry(&m.model)
                .or_default()
                .insert(d.id.clone(), m.aggregate.mse_obs);
        }
    }
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (model, mses) in per_model {
        let reason = if mses.len() != datasets.len() {
            Some("not evaluated on every dataset".to_string())
        } else if mses.len() < 2 {
            Some("needs at least two datasets".to_string())
        } else if mses.values().any(|v| *v <= 0.0) {
            Some("zero MSE on some dataset; log scale undefined".to_string())
        } else {
            None
        };
        if let Some(reason) = reason {
            skipped.push(Note {
                model: model.to_string(),
                reason,
            });
            continue;
        }
        let scores = difficulty_scores(&mses)?;
        for (dataset, score) in scores {
            rows.push(RadarRow {
                model: model.to_string(),
                mse: mses[&dataset],
                dataset,
                score,
            });
        }
    }
    Ok((rows, skipped))
}

pub fn radar_csv(rows: &[RadarRow]) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    let enc = |e: csv::Error| Error::Domain(format!("csv encode: {e}"));
    w.write_record(["model", "dataset", "mse", "score"])
        .map_err(enc)?;
    for r in rows {
        w.write_record([
            r.model.clone(),
            r.dataset.clone(),
            fmt_f64(r.mse),
            fmt_f64(r.score),
        ])
        .map_err(enc)?;
    }
    csv_bytes(w)
}

/// Rows for every model present on both the anomaly dataset and its twin.
pub fn degradation_rows(anomalous: &DatasetReport, twin: &DatasetReport) -> Vec<DegradationRow> {
    anomalous
        .models
        .iter()
        .filter_map(|m| {
            let t = twin.models.iter().find(|t| t.model == m.model)?;
            Some(DegradationRow {
                dataset: anomalous.id.clone(),
                twin: twin.id.clone(),
                model: m.model.clone(),
                mse_anomaly: m.aggregate.mse_obs,
                mse_clean: t.aggregate.mse_obs,
                degradation: degradation(m.aggregate.mse_obs, t.aggregate.mse_obs).ok(),
            })
        })
        .collect()
}

pub fn degradation_csv(rows: &[DegradationRow]) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    let enc = |e: csv::Error| Error::Domain(format!("csv encode: {e}"));
    w.write_record([
        "dataset",
        "twin",
        "model",
        "mse_anomaly",
        "mse_clean",
        "degradation",
    ])
    .map_err(enc)?;
    for r in rows {
        w.write_record([
            r.dataset.clone(),
            r.twin.clone(),
            r.model.clone(),
            fmt_f64(r.mse_anomaly),
            fmt_f64(r.mse_clean),
            opt(r.degradation),
        ])
        .map_err(enc)?;
    }
    csv_bytes(w)
}
