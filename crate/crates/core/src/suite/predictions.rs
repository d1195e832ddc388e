// SPDX-License-Identifier: MIT OR Apache-2.0

//! External prediction files.
//!
//! Layout: header `dataset,model,horizon,window_start,step,<ch0>,<ch1>,...`,
//! one row per forecast step, values in original units. `window_start` is
//! the first input index of a window; the forecast origin is
//! `window_start + input_len`.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::EvalContext;

use super::io::{csv_bytes, csv_err, csv_writer, fmt_f64, parse_f64};

pub const FIXED_COLUMNS: [&str; 5] = ["dataset", "model", "horizon", "window_start", "step"];

/// `[step] -> [channel]` rows collected for one window.
type WindowRows = BTreeMap<usize, Vec<f64>>;

#[derive(Clone, Debug, Default)]
struct ModelPredictions {
    channels: Vec<String>,
    /// horizon -> window_start -> rows
    by_horizon: BTreeMap<usize, BTreeMap<usize, WindowRows>>,
}

/// Every prediction file of one evaluation run.
#[derive(Clone, Debug, Default)]
pub struct PredictionSet {
    /// (dataset, model) -> predictions
    entries: BTreeMap<(String, String), ModelPredictions>,
}

fn field(rec: &csv::StringRecord, i: usize) -> &str {
    rec.get(i).unwrap_or("")
}

fn parse_usize(path: &Path, line: u64, name: &str, v: &str) -> Result<usize> {
    v.parse().map_err(|_| {
        Error::IndexMismatch(format!(
            "{}:{line}: `{name}` = `{v}` is not a non-negative integer",
            path.display()
        ))
    })
}

impl PredictionSet {
    pub fn load(paths: &[PathBuf]) -> Result<Self> {
        let mut set = Self::default();
        for p in paths {
            set.add_file(p)?;
        }
        Ok(set)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add_file(&mut self, path: &Path) -> Result<()> {
        let mut r = csv::ReaderBuilder::new()
            .from_path(path)
            .map_err(|e| csv_err(path, e))?;
        let headers = r.headers().map_err(|e| csv_err(path, e))?.clone();
        if headers.len() <= FIXED_COLUMNS.len()
            || headers.iter().zip(FIXED_COLUMNS).any(|(a, b)| a != b)
        {
            return Err(Error::ShapeMismatch {
                expected: format!("header {},<channels...>", FIXED_COLUMNS.join(",")),
                found: headers.iter().collect::<Vec<_>>().join(","),
            });
        }
        let channels: Vec<String> = headers
            .iter()
            .skip(FIXED_COLUMNS.len())
            .map(str::to_string)
            .collect();
        for rec in r.records() {
            let rec = rec.map_err(|e| csv_err(path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            let dataset = field(&rec, 0).to_string();
            let model = field(&rec, 1).to_string();
            if model.is_empty() || dataset.is_empty() {
                return Err(Error::IndexMismatch(format!(
                    "{}:{line}: empty dataset or model",
                    path.display()
                )));
            }
            let horizon = parse_usize(path, line, "horizon", field(&rec, 2))?;
            let start = parse_usize(path, line, "window_start", field(&rec, 3))?;
            let step = parse_usize(path, line, "step", field(&rec, 4))?;
            if step >= horizon {
                return Err(Error::IndexMismatch(format!(
                    "{}:{line}: step {step} outside horizon {horizon}",
                    path.display()
                )));
            }
            let values = rec
                .iter()
                .skip(FIXED_COLUMNS.len())
                .map(|v| parse_f64(path, v))
                .collect::<Result<Vec<f64>>>()?;
            let entry = self
                .entries
                .entry((dataset.clone(), model.clone()))
                .or_default();
            if entry.channels.is_empty() {
                entry.channels = channels.clone();
            } else if entry.channels != channels {
                return Err(Error::ShapeMismatch {
                    expected: entry.channels.join(","),
                    found: channels.join(","),
                });
            }
            let rows = entry
                .by_horizon
                .entry(horizon)
                .or_default()
                .entry(start)
                .or_default();
            if rows.insert(step, values).is_some() {
                return Err(Error::IndexMismatch(format!(
                    "{}:{line}: duplicate prediction for dataset `{dataset}`, model `{model}`, horizon {horizon}, window {start}, step {step}",
                    path.display()
                )));
            }
        }
        Ok(())
    }

    pub fn datasets(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.entries.keys().map(|(d, _)| d.as_str()).collect();
        v.dedup();
        v
    }

    pub fn models_for(&self, dataset: &str) -> Vec<&str> {
        self.entries
            .keys()
            .filter(|(d, _)| d == dataset)
            .map(|(_, m)| m.as_str())
            .collect()
    }

    /// Checks coverage against the harness windows and returns a lookup of
    /// `(horizon, origin) -> [channel][step]`.
    pub fn table(&self, dataset: &str, model: &str, ctx: &EvalContext) -> Result<PredictionTable> {
        let entry = self
            .entries
            .get(&(dataset.to_string(), model.to_string()))
            .ok_or_else(|| {
                Error::IndexMismatch(format!(
                    "no predictions for dataset `{dataset}`, model `{model}`"
                ))
            })?;
        let names = ctx.series().channel_names();
        if entry.channels != names {
            return Err(Error::ShapeMismatch {
                expected: names.join(","),
                found: entry.channels.join(","),
            });
        }
        let input_len = ctx.protocol().input_len;
        let empty = BTreeMap::new();
        let mut table = HashMap::new();
        for &h in &ctx.protocol().horizons {
            let windows = ctx.windows(h)?;
            let given = entry.by_horizon.get(&h).unwrap_or(&empty);
            for w in &windows {
                let start = w.start_index();
                let rows = given.get(&start).ok_or_else(|| Error::MissingWindow {
                    dataset: dataset.to_string(),
                    model: model.to_string(),
                    horizon: h,
                    start,
                })?;
                if rows.len() != h {
                    let missing = (0..h).find(|k| !rows.contains_key(k)).unwrap_or(h);
                    return Err(Error::IndexMismatch(format!(
                        "dataset `{dataset}`, model `{model}`, horizon {h}, window {start}: missing step {missing}"
                    )));
                }
                let by_channel: Vec<Vec<f64>> = (0..names.len())
                    .map(|c| rows.values().map(|r| r[c]).collect())
                    .collect();
                table.insert((h, start + input_len), by_channel);
            }
            if given.len() != windows.len() {
                let expected: std::collections::BTreeSet<usize> =
                    windows.iter().map(|w| w.start_index()).collect();
                let extra = given
                    .keys()
                    .find(|s| !expected.contains(s))
                    .copied()
                    .unwrap_or_default();
                return Err(Error::IndexMismatch(format!(
                    "dataset `{dataset}`, model `{model}`, horizon {h}: window {extra} is not an evaluation window"
                )));
            }
        }
        for h in entry.by_horizon.keys() {
            if !ctx.protocol().horizons.contains(h) {
                return Err(Error::IndexMismatch(format!(
                    "dataset `{dataset}`, model `{model}`: horizon {h} is not in the protocol"
                )));
            }
        }
        Ok(PredictionTable { table })
    }
}

/// Validated predictions for one dataset and model.
#[derive(Clone, Debug)]
pub struct PredictionTable {
    table: HashMap<(usize, usize), Vec<Vec<f64>>>,
}

impl PredictionTable {
    pub fn get(&self, origin: usize, horizon: usize) -> Result<Vec<Vec<f64>>> {
        self.table.get(&(horizon, origin)).cloned().ok_or_else(|| {
            Error::IndexMismatch(format!(
                "no prediction at origin {origin}, horizon {horizon}"
            ))
        })
    }
}

/// Prediction file bytes for `model` from a forecast function over every window.
pub fn prediction_csv(
    dataset: &str,
    model: &str,
    ctx: &EvalContext,
    forecast: &dyn Fn(usize, usize) -> Result<Vec<Vec<f64>>>,
) -> Result<Vec<u8>> {
    let mut w = csv_writer();
    let enc = |e: csv::Error| Error::Domain(format!("csv encode: {e}"));
    let header: Vec<&str> = FIXED_COLUMNS
        .iter()
        .copied()
        .chain(ctx.series().channel_names().iter().map(String::as_str))
        .collect();
    w.write_record(&header).map_err(enc)?;
    for &h in &ctx.protocol().horizons {
        for win in ctx.windows(h)? {
            let fc = forecast(win.origin(), h)?;
            for k in 0..h {
                let mut row = vec![
                    dataset.to_string(),
                    model.to_string(),
                    h.to_string(),
                    win.start_index().to_string(),
                    k.to_string(),
                ];
                row.extend(fc.iter().map(|c| fmt_f64(c[k])));
                w.write_record(&row).map_err(enc)?;
            }
        }
    }
    csv_bytes(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_dataset, DatasetSpec, GeneratorSpec};
    use crate::series::EvalProtocol;

    fn setup() -> (crate::dataset::SyntheticDataset, EvalProtocol) {
        let ds = generate_dataset(&DatasetSpec::new(
            "wn",
            600,
            2,
            GeneratorSpec::WhiteNoise {
                sigma: 1.0,
                mean: 0.0,
            },
        ))
        .unwrap();
        let p = EvalProtocol {
            horizons: vec![4],
            ..EvalProtocol::default()
        };
        (ds, p)
    }

    fn write(dir: &Path, body: &[u8]) -> PathBuf {
        let p = dir.join("pred.csv");
        std::fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn round_trip_and_missing_window() {
        let (ds, p) = setup();
        let ctx = EvalContext::new(&ds.series, &p).unwrap();
        let zero = |_: usize, h: usize| Ok(vec![vec![0.0; h]]);
        let bytes = prediction_csv("wn", "zero", &ctx, &zero).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let set = PredictionSet::load(&[write(dir.path(), &bytes)]).unwrap();
        let t = set.table("wn", "zero", &ctx).unwrap();
        let first = ctx.windows(4).unwrap()[0];
        assert_eq!(t.get(first.origin(), 4).unwrap(), vec![vec![0.0; 4]]);

        let text = String::from_utf8(bytes).unwrap();
        let start = first.start_index() + 3;
        let kept: String = text
            .lines()
            .filter(|l| !l.starts_with(&format!("wn,zero,4,{start},")))
            .map(|l| format!("{l}\n"))
            .collect();
        let set = PredictionSet::load(&[write(dir.path(), kept.as_bytes())]).unwrap();
        match set.table("wn", "zero", &ctx) {
            Err(Error::MissingWindow { start: s, .. }) => assert_eq!(s, start),
            other => panic!("expected MissingWindow, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_and_extra_rows() {
        let (ds, p) = setup();
        let ctx = EvalContext::new(&ds.series, &p).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let dup =
            "dataset,model,horizon,window_start,step,value\nwn,m,4,480,0,1.0\nwn,m,4,480,0,1.0\n";
        assert!(matches!(
            PredictionSet::load(&[write(dir.path(), dup.as_bytes())]),
            Err(Error::IndexMismatch(_))
        ));
        let zero = |_: usize, h: usize| Ok(vec![vec![0.0; h]]);
        let mut bytes = prediction_csv("wn", "zero", &ctx, &zero).unwrap();
        bytes.extend_from_slice(
            b"wn,zero,4,3,0,0.0\nwn,zero,4,3,1,0.0\nwn,zero,4,3,2,0.0\nwn,zero,4,3,3,0.0\n",
        );
        let set = PredictionSet::load(&[write(dir.path(), &bytes)]).unwrap();
        assert!(matches!(
            set.table("wn", "zero", &ctx),
            Err(Error::IndexMismatch(_))
        ));
    }

    #[test]
    fn wrong_channels() {
        let (ds, p) = setup();
        let ctx = EvalContext::new(&ds.series, &p).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let body = "dataset,model,horizon,window_start,step,other\nwn,m,4,480,0,1.0\n";
        let set = PredictionSet::load(&[write(dir.path(), body.as_bytes())]).unwrap();
        assert!(matches!(
            set.table("wn", "m", &ctx),
            Err(Error::ShapeMismatch { .. })
        ));
    }
}
