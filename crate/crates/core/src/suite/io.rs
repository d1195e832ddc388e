// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dataset CSV and metadata files.
//!
//! Floats are written with Rust's shortest round-trip representation so a
//! reload reproduces every value bit for bit.

use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corruption::{AnomalyRecord, NoiseRecord};
use crate::dataset::{DatasetSpec, SyntheticDataset};
use crate::error::{Error, Result};
use crate::multivar::{catalog_version, CoupledSystem};
use crate::oracle::OracleClass;
use crate::series::{split_baseline, split_len, EvalProtocol, Splits};

use super::ARTIFACT_VERSION;

pub const META_FORMAT: u32 = 1;

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

pub(crate) fn csv_bytes(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| Error::Domain(format!("csv buffer: {e}")))
}

pub(crate) fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::DataMismatch(format!("{}: malformed CSV: {other:?}", path.display())),
    }
}

pub(crate) fn parse_f64(path: &Path, field: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::DataMismatch(format!("{}: `{field}` is not a number", path.display())))
}

/// `t,<ch0>,<ch1>,...` with `t` counting from 0.
pub fn series_csv(names: &[String], channels: &[Vec<f64>]) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    let io = |e: csv::Error| Error::Domain(format!("csv encode: {e}"));
    w.write_record(std::iter::once("t").chain(names.iter().map(String::as_str)))
        .map_err(io)?;
    let n = channels.first().map_or(0, Vec::len);
    for t in 0..n {
        let mut row = vec![t.to_string()];
        row.extend(channels.iter().map(|c| fmt_f64(c[t])));
        w.write_record(&row).map_err(io)?;
    }
    csv_bytes(w)
}

/// Reads a file written by [`series_csv`]: (channel names, `[channel][t]`).
pub fn read_series_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
    if headers.get(0) != Some("t") {
        return Err(Error::DataMismatch(format!(
            "{}: first column must be `t`",
            path.display()
        )));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut channels = vec![Vec::new(); names.len()];
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        if rec.get(0) != Some(i.to_string().as_str()) {
            return Err(Error::IndexMismatch(format!(
                "{}: row {i} has t = `{}`",
                path.display(),
                rec.get(0).unwrap_or("")
            )));
        }
        for (c, field) in rec.iter().skip(1).enumerate() {
            channels[c].push(parse_f64(path, field)?);
        }
    }
    Ok((names, channels))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitMeta {
    /// Fit and evaluation ranges used by the oracle and baselines, present
    /// when both admit a window at the largest horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_fit: Option<Range<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline_eval: Option<Range<usize>>,
    /// Train / validation / test ranges for window-trained models, present
    /// when every partition admits a window at the largest horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<Splits>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub format: u32,
    pub artifact_version: String,
    pub catalog_version: String,
    pub id: String,
    pub n: usize,
    pub seed: u64,
    pub spec: DatasetSpec,
    pub channels: Vec<String>,
    pub oracle_classes: Vec<OracleClass>,
    pub structure: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<CoupledSystem>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anomalies: Vec<AnomalyRecord>,
    pub splits: SplitMeta,
    pub observed_file: String,
    pub clean_file: String,
}

impl DatasetMeta {
    pub fn new(ds: &SyntheticDataset, protocol: &EvalProtocol) -> Result<Self> {
        let n = ds.series.n_steps();
        let (fit, eval) = split_baseline(n, protocol).ok().unzip();
        Ok(Self {
            format: META_FORMAT,
            artifact_version: ARTIFACT_VERSION.to_string(),
            catalog_version: catalog_version().to_string(),
            id: ds.id().to_string(),
            n,
            seed: ds.spec.seed,
            spec: ds.spec.clone(),
            channels: ds.series.channel_names().to_vec(),
            oracle_classes: ds.classes.clone(),
            structure: ds.structure.clone(),
            system: ds.system.clone(),
            noise: ds.noise.clone(),
            anomalies: ds.anomalies.clone(),
            splits: SplitMeta {
                baseline_fit: fit,
                baseline_eval: eval,
                model: split_len(n, protocol).ok(),
            },
            observed_file: observed_name(ds.id()),
            clean_file: clean_name(ds.id()),
        })
    }

    pub fn to_json(&self) -> Result<Vec<u8>> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Domain(format!("meta encode: {e}")))?;
        s.push('\n');
        Ok(s.into_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub fn observed_name(id: &str) -> String {
    format!("{id}.csv")
}

pub fn clean_name(id: &str) -> String {
    format!("{id}_clean.csv")
}

pub fn meta_name(id: &str) -> String {
    format!("{id}.meta.json")
}

/// Writes `<id>.csv`, `<id>_clean.csv` and `<id>.meta.json` into `dir`.
pub fn write_dataset(
    dir: &Path,
    ds: &SyntheticDataset,
    protocol: &EvalProtocol,
) -> Result<Vec<PathBuf>> {
    let names = ds.series.channel_names();
    let files = [
        (
            observed_name(ds.id()),
            series_csv(names, ds.series.observed_channels())?,
        ),
        (
            clean_name(ds.id()),
            series_csv(names, ds.series.clean_channels())?,
        ),
        (
            meta_name(ds.id()),
            DatasetMeta::new(ds, protocol)?.to_json()?,
        ),
    ];
    files
        .into_iter()
        .map(|(name, bytes)| {
            let path = dir.join(name);
            write_atomic(&path, &bytes)?;
            Ok(path)
        })
        .collect()
}

fn same_bits(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits())
        })
}

/// Checks files in `dir` against a freshly generated dataset.
pub fn verify_dataset(dir: &Path, ds: &SyntheticDataset) -> Result<()> {
    let meta = DatasetMeta::load(&dir.join(meta_name(ds.id())))?;
    if meta.spec != ds.spec {
        return Err(Error::DataMismatch(format!(
            "dataset `{}`: meta.json describes a different spec",
            ds.id()
        )));
    }
    for (file, expected) in [
        (observed_name(ds.id()), ds.series.observed_channels()),
        (clean_name(ds.id()), ds.series.clean_channels()),
    ] {
        let path = dir.join(&file);
        let (names, values) = read_series_csv(&path)?;
        if names != ds.series.channel_names() || !same_bits(&values, expected) {
            return Err(Error::DataMismatch(format!(
                "{} does not match the regenerated dataset `{}`",
                path.display(),
                ds.id()
            )));
        }
    }
    Ok(())
}
