// SPDX-License-Identifier: MIT OR Apache-2.0

//! Forecast metrics, horizon aggregation, difficulty scores and degradation.
//!
//! Errors are averaged within each window first, then across windows.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Targets with magnitude at or below this make MAPE undefined.
pub const MAPE_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub mse_obs: f64,
    pub mse_true: Option<f64>,
    pub mae: f64,
    pub rmse: f64,
    pub mape: Option<f64>,
    pub smape: f64,
}

impl MetricRow {
    pub const NAMES: [&'static str; 6] = ["mse_obs", "mse_true", "mae", "rmse", "mape", "smape"];

    /// Values in the order of [`MetricRow::NAMES`].
    pub fn values(&self) -> [Option<f64>; 6] {
        [
            Some(self.mse_obs),
            self.mse_true,
            Some(self.mae),
            Some(self.rmse),
            self.mape,
            Some(self.smape),
        ]
    }

    pub fn from_values(values: [Option<f64>; 6]) -> Result<Self> {
        let req = |i: usize| {
            values[i]
                .ok_or_else(|| Error::Config(format!("metric `{}` is required", Self::NAMES[i])))
        };
        Ok(Self {
            mse_obs: req(0)?,
            mse_true: values[1],
            mae: req(2)?,
            rmse: req(3)?,
            mape: values[4],
            smape: req(5)?,
        })
    }
}

fn smape_term(y: f64, p: f64) -> f64 {
    let denom = (y.abs() + p.abs()) / 2.0;
    if denom == 0.0 {
        0.0
    } else {
        (y - p).abs() / denom
    }
}

/// Metrics of one prediction against its observed and (optionally) clean targets.
pub fn compute_metrics(
    pred: &[f64],
    target_obs: &[f64],
    target_clean: Option<&[f64]>,
) -> Result<MetricRow> {
    let mut acc = Accumulator::new(1, pred.len(), target_clean.is_some());
    acc.push_window(
        &[pred],
        &[target_obs],
        target_clean.map(|c| [c]).as_ref().map(|c| &c[..]),
    )?;
    Ok(acc.finish().row)
}

fn shape_err(expected: usize, found: usize) -> Error {
    Error::ShapeMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Window-level sums that merge associatively.
#[derive(Clone, Debug, PartialEq)]
pub struct Accumulator {
    channels: usize,
    horizon: usize,
    windows: usize,
    mse_obs: f64,
    mse_obs_sq: f64,
    mse_true: Option<f64>,
    mae: f64,
    mape: Option<f64>,
    smape: f64,
    /// `[channel][step]` sums of squared errors.
    step_se_obs: Vec<Vec<f64>>,
    step_se_true: Option<Vec<Vec<f64>>>,
}

/// Result of folding every window at one horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonMetrics {
    pub horizon: usize,
    pub window_count: usize,
    pub row: MetricRow,
    /// Population std of the per-window MSE_Obs.
    pub window_mse_std: f64,
    /// `[channel][step]` mean squared error against observed targets.
    pub step_mse_obs: Vec<Vec<f64>>,
    pub step_mse_true: Option<Vec<Vec<f64>>>,
}

impl HorizonMetrics {
    /// Standard error of MSE_Obs. Windows overlapping in their targets are
    /// correlated, so only `window_count / horizon` are counted as independent.
    pub fn mse_std_error(&self) -> f64 {
        let eff = (self.window_count as f64 / self.horizon as f64).max(1.0);
        self.window_mse_std / eff.sqrt()
    }
}

impl Accumulator {
    pub fn new(channels: usize, horizon: usize, with_clean: bool) -> Self {
        Self {
            channels,
            horizon,
            windows: 0,
            mse_obs: 0.0,
            mse_obs_sq: 0.0,
            mse_true: with_clean.then_some(0.0),
            mae: 0.0,
            mape: Some(0.0),
            smape: 0.0,
            step_se_obs: vec![vec![0.0; horizon]; channels],
            step_se_true: with_clean.then(|| vec![vec![0.0; horizon]; channels]),
        }
    }

    /// Adds one window; slices are `[channel][step]`.
    pub fn push_window<P: AsRef<[f64]>, O: AsRef<[f64]>, C: AsRef<[f64]>>(
        &mut self,
        pred: &[P],
        obs: &[O],
        clean: Option<&[C]>,
    ) -> Result<()> {
        if pred.len() != self.channels || obs.len() != self.channels {
            return Err(shape_err(self.channels, pred.len().min(obs.len())));
        }
        if clean.is_some() != self.mse_true.is_some() {
            return Err(Error::ShapeMismatch {
                expected: format!("clean targets present: {}", self.mse_true.is_some()),
                found: format!("clean targets present: {}", clean.is_some()),
            });
        }
        let count = (self.channels * self.horizon) as f64;
        let (mut se, mut st, mut ae, mut ape, mut sm) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut mape_ok = true;
        for c in 0..self.channels {
            let p = pred[c].as_ref();
            let y = obs[c].as_ref();
            if p.len() != self.horizon || y.len() != self.horizon {
                return Err(shape_err(self.horizon, p.len().min(y.len())));
            }
            for k in 0..self.horizon {
                let e = y[k] - p[k];
                se += e * e;
                self.step_se_obs[c][k] += e * e;
                ae += e.abs();
                if y[k].abs() > MAPE_EPS {
                    ape += e.abs() / y[k].abs();
                } else {
                    mape_ok = false;
                }
                sm += smape_term(y[k], p[k]);
            }
            if let (Some(clean), Some(steps)) = (clean, self.step_se_true.as_mut()) {
                let x = clean[c].as_ref();
                if x.len() != self.horizon {
                    return Err(shape_err(self.horizon, x.len()));
                }
                for k in 0..self.horizon {
                    let e = x[k] - p[k];
                    st += e * e;
                    steps[c][k] += e * e;
                }
            }
        }
        let w = se / count;
        self.windows += 1;
        self.mse_obs += w;
        self.mse_obs_sq += w * w;
        self.mae += ae / count;
        self.smape += sm / count;
        if let Some(t) = self.mse_true.as_mut() {
            *t += st / count;
        }
        self.mape = match (self.mape, mape_ok) {
            (Some(m), true) => Some(m + ape / count),
            _ => None,
        };
        Ok(())
    }

    /// Appends `other`, which must cover later windows of the same shape.
    pub fn merge(&mut self, other: &Accumulator) {
        self.windows += other.windows;
        self.mse_obs += other.mse_obs;
        self.mse_obs_sq += other.mse_obs_sq;
        self.mae += other.mae;
        self.smape += other.smape;
        self.mse_true = self.mse_true.zip(other.mse_true).map(|(a, b)| a + b);
        self.mape = self.mape.zip(other.mape).map(|(a, b)| a + b);
        for (a, b) in self.step_se_obs.iter_mut().zip(&other.step_se_obs) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
        if let (Some(a), Some(b)) = (self.step_se_true.as_mut(), other.step_se_true.as_ref()) {
            for (a, b) in a.iter_mut().zip(b) {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            }
        }
    }

    pub fn windows(&self) -> usize {
        self.windows
    }

    pub fn finish(&self) -> HorizonMetrics {
        let n = self.windows.max(1) as f64;
        let mse_obs = self.mse_obs / n;
        let var = (self.mse_obs_sq / n - mse_obs * mse_obs).max(0.0);
        let steps = |m: &Vec<Vec<f64>>| {
            m.iter()
                .map(|c| c.iter().map(|v| v / n).collect())
                .collect()
        };
        HorizonMetrics {
            horizon: self.horizon,
            window_count: self.windows,
            row: MetricRow {
                mse_obs,
                mse_true: self.mse_true.map(|t| t / n),
                mae: self.mae / n,
                rmse: mse_obs.sqrt(),
                mape: self.mape.map(|m| 100.0 * m / n),
                smape: 100.0 * self.smape / n,
            },
            window_mse_std: var.sqrt(),
            step_mse_obs: steps(&self.step_se_obs),
            step_mse_true: self.step_se_true.as_ref().map(steps),
        }
    }
}

/// Unweighted mean of each metric across `horizons`. Optional metrics stay
/// present only when every row has them.
pub fn aggregate(rows: &BTreeMap<usize, MetricRow>, horizons: &[usize]) -> Result<MetricRow> {
    if horizons.is_empty() {
        return Err(Error::Param("no horizons to aggregate".into()));
    }
    let picked: Vec<&MetricRow> = horizons
        .iter()
        .map(|h| rows.get(h).ok_or(Error::MissingHorizon(*h)))
        .collect::<Result<_>>()?;
    let n = picked.len() as f64;
    let mean = |f: &dyn Fn(&MetricRow) -> f64| picked.iter().map(|r| f(r)).sum::<f64>() / n;
    let mean_opt = |f: &dyn Fn(&MetricRow) -> Option<f64>| {
        picked
            .iter()
            .map(|r| f(r))
            .sum::<Option<f64>>()
            .map(|s| s / n)
    };
    Ok(MetricRow {
        mse_obs: mean(&|r| r.mse_obs),
        mse_true: mean_opt(&|r| r.mse_true),
        mae: mean(&|r| r.mae),
        rmse: mean(&|r| r.rmse),
        mape: mean_opt(&|r| r.mape),
        smape: mean(&|r| r.smape),
    })
}

/// Radar scores: log10 of each MSE, then `1 − (v − min)/(max − min)`.
/// The hardest pattern scores 0, the easiest 1; equal values all score 0.5.
pub fn difficulty_scores(avg_mse: &BTreeMap<String, f64>) -> Result<BTreeMap<String, f64>> {
    if avg_mse.len() < 2 {
        return Err(Error::Param(
            "difficulty scores need at least two patterns".into(),
        ));
    }
    if let Some((k, v)) = avg_mse.iter().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Param(format!(
            "pattern `{k}` has non-positive MSE {v}"
        )));
    }
    let logs: BTreeMap<&String, f64> = avg_mse.iter().map(|(k, v)| (k, v.log10())).collect();
    let min = logs.values().copied().fold(f64::INFINITY, f64::min);
    let max = logs.values().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(logs
        .into_iter()
        .map(|(k, v)| {
            let s = if max == min {
                0.5
            } else {
                1.0 - (v - min) / (max - min)
            };
            (k.clone(), s)
        })
        .collect())
}

/// `(mse_anomaly − mse_clean) / mse_clean`.
pub fn degradation(mse_anomaly: f64, mse_clean: f64) -> Result<f64> {
    if mse_clean == 0.0 {
        return Err(Error::ZeroCleanMse);
    }
    Ok((mse_anomaly - mse_clean) / mse_clean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_prediction_is_zero() {
        let y = [1.0, -2.0, 3.0];
        let r = compute_metrics(&y, &y, Some(&y)).unwrap();
        assert_eq!(r.values(), [Some(0.0); 6]);
    }

    #[test]
    fn smape_half_sum_denominator() {
        let r = compute_metrics(&[2.0], &[1.0], None).unwrap();
        assert!((r.smape - 200.0 / 3.0).abs() < 1e-9);
        assert_eq!(r.mape, Some(100.0));
        assert_eq!(r.mse_true, None);
    }

    #[test]
    fn mape_absent_on_zero_target() {
        let r = compute_metrics(&[1.0, 1.0], &[0.0, 2.0], None).unwrap();
        assert_eq!(r.mape, None);
        assert!((r.smape - 400.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn shape_mismatch() {
        assert!(matches!(
            compute_metrics(&[1.0], &[1.0, 2.0], None),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn radar_examples() {
        let m: BTreeMap<String, f64> = [("A", 1e-4), ("B", 1e-2), ("C", 1.0)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        let s = difficulty_scores(&m).unwrap();
        assert_eq!((s["A"], s["B"], s["C"]), (1.0, 0.5, 0.0));
        let same: BTreeMap<String, f64> = [("A", 0.3), ("B", 0.3)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert!(difficulty_scores(&same)
            .unwrap()
            .values()
            .all(|v| *v == 0.5));
    }

    #[test]
    fn degradation_examples() {
        assert!((degradation(0.03, 0.02).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(degradation(0.7, 0.7).unwrap(), 0.0);
        assert!((degradation(0.0884, 0.02).unwrap() - 3.42).abs() < 1e-12);
        assert!(matches!(degradation(1.0, 0.0), Err(Error::ZeroCleanMse)));
    }

    #[test]
    fn aggregate_mean_and_missing() {
        let row = |m: f64| MetricRow {
            mse_obs: m,
            mse_true: Some(0.0),
            mae: m,
            rmse: m.sqrt(),
            mape: None,
            smape: m,
        };
        let rows: BTreeMap<usize, MetricRow> =
            [(24, row(1.0)), (48, row(3.0))].into_iter().collect();
        assert_eq!(aggregate(&rows, &[24, 48]).unwrap().mse_obs, 2.0);
        assert_eq!(
            aggregate(&rows, &[48, 24]).unwrap(),
            aggregate(&rows, &[24, 48]).unwrap()
        );
        assert!(matches!(
            aggregate(&rows, &[96]),
            Err(Error::MissingHorizon(96))
        ));
    }

    proptest! {
        #[test]
        fn rmse_is_sqrt_mse_and_scaling(
            pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 1..50),
            c in 0.1f64..10.0,
        ) {
            let y: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let p: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let r = compute_metrics(&p, &y, Some(&y)).unwrap();
            prop_assert!((r.rmse - r.mse_obs.sqrt()).abs() <= 1e-12 * r.rmse.max(1.0));
            prop_assert!(r.mse_obs >= 0.0 && r.mae >= 0.0 && r.smape >= 0.0);
            let ys: Vec<f64> = y.iter().map(|v| v * c).collect();
            let ps: Vec<f64> = p.iter().map(|v| v * c).collect();
            let s = compute_metrics(&ps, &ys, None).unwrap();
            prop_assert!((s.mae - c * r.mae).abs() <= 1e-9 * s.mae.max(1.0));
            prop_assert!((s.mse_obs - c * c * r.mse_obs).abs() <= 1e-9 * s.mse_obs.max(1.0));
        }

        #[test]
        fn radar_scale_invariant_and_monotone(
            vals in prop::collection::vec(1e-6f64..1e3, 2..8),
            scale in 1e-3f64..1e3,
            bump in 1.0f64..100.0,
        ) {
            let m: BTreeMap<String, f64> = vals.iter().enumerate().map(|(i, v)| (format!("p{i}"), *v)).collect();
            let scaled: BTreeMap<String, f64> = m.iter().map(|(k, v)| (k.clone(), v * scale)).collect();
            let a = difficulty_scores(&m).unwrap();
            let b = difficulty_scores(&scaled).unwrap();
            for k in a.keys() {
                prop_assert!((a[k] - b[k]).abs() < 1e-9);
                prop_assert!((0.0..=1.0).contains(&a[k]));
            }
            let mut bumped = m.clone();
            *bumped.get_mut("p0").unwrap() *= bump;
            prop_assert!(difficulty_scores(&bumped).unwrap()["p0"] <= a["p0"] + 1e-12);
        }

        #[test]
        fn merge_equals_sequential(
            data in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 8), 2..20),
            cut in 1usize..19,
        ) {
            let cut = cut.min(data.len() - 1);
            let push = |acc: &mut Accumulator, w: &Vec<f64>| {
                acc.push_window(&[&w[..4]], &[&w[4..]], Some(&[&w[4..]][..])).unwrap();
            };
            let mut whole = Accumulator::new(1, 4, true);
            data.iter().for_each(|w| push(&mut whole, w));
            let mut left = Accumulator::new(1, 4, true);
            let mut right = Accumulator::new(1, 4, true);
            data[..cut].iter().for_each(|w| push(&mut left, w));
            data[cut..].iter().for_each(|w| push(&mut right, w));
            left.merge(&right);
            prop_assert_eq!(left.windows(), whole.windows());
            let (a, b) = (left.finish().row, whole.finish().row);
            prop_assert!((a.mse_obs - b.mse_obs).abs() < 1e-9);
            prop_assert!((a.smape - b.smape).abs() < 1e-9);
        }
    }
}
