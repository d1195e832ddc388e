// SPDX-License-Identifier: MIT OR Apache-2.0

//! Multichannel series with paired observed and clean values, chronological
//! splits, sliding windows and z-score normalization.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multichannel series. `observed` is what a forecaster sees (y), `clean`
/// is the predictable part (x). Both are stored channel-major.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    channel_names: Vec<String>,
    observed: Vec<Vec<f64>>,
    clean: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new(
        channel_names: Vec<String>,
        observed: Vec<Vec<f64>>,
        clean: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if channel_names.is_empty() {
            return Err(Error::Param("a series needs at least one channel".into()));
        }
        if observed.len() != channel_names.len() || clean.len() != channel_names.len() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} channels", channel_names.len()),
                found: format!("{} observed / {} clean", observed.len(), clean.len()),
            });
        }
        let n = observed[0].len();
        if n == 0 {
            return Err(Error::Param("a series needs at least one step".into()));
        }
        for (o, c) in observed.iter().zip(&clean) {
            if o.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: o.len(),
                });
            }
            if c.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
        }
        Ok(Self {
            channel_names,
            observed,
            clean,
        })
    }

    /// Single-channel series with `observed == clean`.
    pub fn deterministic(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(vec![name.into()], vec![values.clone()], vec![values])
    }

    pub fn n_steps(&self) -> usize {
        self.observed[0].len()
    }

    pub fn n_channels(&self) -> usize {
        self.observed.len()
    }

    pub fn channel_names(&self) -> &[String] {
        &self.channel_names
    }

    pub fn observed(&self, channel: usize) -> &[f64] {
        &self.observed[channel]
    }

    pub fn clean(&self, channel: usize) -> &[f64] {
        &self.clean[channel]
    }

    pub fn observed_channels(&self) -> &[Vec<f64>] {
        &self.observed
    }

    pub fn clean_channels(&self) -> &[Vec<f64>] {
        &self.clean
    }

    pub fn is_finite(&self) -> bool {
        self.observed
            .iter()
            .chain(&self.clean)
            .all(|c| c.iter().all(|v| v.is_finite()))
    }

    pub fn into_parts(self) -> (Vec<String>, Vec<Vec<f64>>, Vec<Vec<f64>>) {
        (self.channel_names, self.observed, self.clean)
    }

    pub fn with_channel_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.n_channels() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} names", self.n_channels()),
                found: format!("{} names", names.len()),
            });
        }
        self.channel_names = names;
        Ok(self)
    }

    /// Replaces the observed channels, keeping clean values and names.
    pub fn with_observed(self, observed: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(self.channel_names, observed, self.clean)
    }

    /// Concatenates the channels of several equally long series.
    pub fn stack(parts: Vec<TimeSeries>) -> Result<Self> {
        let mut names = Vec::new();
        let mut observed = Vec::new();
        let mut clean = Vec::new();
        for part in parts {
            let (n, o, c) = part.into_parts();
            names.extend(n);
            observed.extend(o);
            clean.extend(c);
        }
        Self::new(names, observed, clean)
    }
}

fn default_input_len() -> usize {
    96
}

fn default_horizons() -> Vec<usize> {
    vec![10, 24, 48, 96, 192]
}

fn default_stride() -> usize {
    1
}

fn default_split() -> [f64; 3] {
    [0.7, 0.1, 0.2]
}

fn default_baseline_split() -> [f64; 2] {
    [0.8, 0.2]
}

fn default_true() -> bool {
    true
}

/// Sliding-window evaluation protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalProtocol {
    #[serde(default = "default_input_len")]
    pub input_len: usize,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<usize>,
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// train / validation / test ratios for window-trained models.
    #[serde(default = "default_split")]
    pub split: [f64; 3],
    /// fit / evaluation ratios for the classical baselines and the oracle.
    #[serde(default = "default_baseline_split")]
    pub baseline_split: [f64; 2],
    #[serde(default = "default_true")]
    pub normalize: bool,
    #[serde(default)]
    pub eval_on_original_scale: bool,
}

impl Default for EvalProtocol {
    fn default() -> Self {
        Self {
            input_len: default_input_len(),
            horizons: default_horizons(),
            stride: default_stride(),
            split: default_split(),
            baseline_split: default_baseline_split(),
            normalize: true,
            eval_on_original_scale: false,
        }
    }
}

impl EvalProtocol {
    pub fn validate(&self) -> Result<()> {
        if self.input_len == 0 {
            return Err(Error::Param("input_len must be positive".into()));
        }
        if self.stride == 0 {
            return Err(Error::Param("stride must be at least 1".into()));
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(Error::Param(
                "horizons must be a non-empty set of positive steps".into(),
            ));
        }
        let mut sorted = self.horizons.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.horizons.len() {
            return Err(Error::Param("horizons contain duplicates".into()));
        }
        check_ratios("split", &self.split)?;
        check_ratios("baseline_split", &self.baseline_split)?;
        Ok(())
    }

    pub fn max_horizon(&self) -> usize {
        self.horizons.iter().copied().max().unwrap_or(0)
    }

    /// Steps a partition needs to admit one window at the largest horizon.
    pub fn min_partition_len(&self) -> usize {
        self.input_len + self.max_horizon()
    }

    /// Whether metrics are reported on the normalized scale.
    pub fn scores_normalized(&self) -> bool {
        self.normalize && !self.eval_on_original_scale
    }
}

fn check_ratios(name: &str, ratios: &[f64]) -> Result<()> {
    if ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Param(format!("{name} ratios must be positive")));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Param(format!("{name} ratios sum to {sum}, not 1")));
    }
    Ok(())
}

/// Chronological train / validation / test index ranges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Range<usize>,
    pub val: Range<usize>,
    pub test: Range<usize>,
}

/// Contiguous chronological partition boundaries for `n` steps.
pub fn partition_bounds(n: usize, ratios: &[f64]) -> Vec<Range<usize>> {
    let mut out = Vec::with_capacity(ratios.len());
    let mut cumulative = 0.0;
    let mut start = 0;
    for (i, r) in ratios.iter().enumerate() {
        cumulative += r;
        let end = if i + 1 == ratios.len() {
            n
        } else {
            ((n as f64) * cumulative).round().min(n as f64) as usize
        };
        out.push(start..end);
        start = end;
    }
    out
}

fn check_partitions(names: &[&'static str], ranges: &[Range<usize>], needed: usize) -> Result<()> {
    // Test (last) partition is reported first since that is the one scored.
    for (name, range) in names.iter().zip(ranges).rev() {
        if range.len() < needed {
            return Err(Error::PartitionTooSmall {
                partition: name,
                len: range.len(),
                needed,
            });
        }
    }
    Ok(())
}

pub fn split_series(ts: &TimeSeries, protocol: &EvalProtocol) -> Result<Splits> {
    split_len(ts.n_steps(), protocol)
}

pub fn split_len(n: usize, protocol: &EvalProtocol) -> Result<Splits> {
    let ranges = partition_bounds(n, &protocol.split);
    check_partitions(
        &["train", "val", "test"],
        &ranges,
        protocol.min_partition_len(),
    )?;
    let mut it = ranges.into_iter();
    Ok(Splits {
        train: it.next().unwrap(),
        val: it.next().unwrap(),
        test: it.next().unwrap(),
    })
}

/// The 8:2 split used by the classical baselines: (fit range, evaluation range).
pub fn split_baseline(n: usize, protocol: &EvalProtocol) -> Result<(Range<usize>, Range<usize>)> {
    let ranges = partition_bounds(n, &protocol.baseline_split);
    check_partitions(&["fit", "eval"], &ranges, protocol.min_partition_len())?;
    Ok((ranges[0].clone(), ranges[1].clone()))
}

/// One forecasting window. Borrows its series; `origin()` is the index of
/// the first target step.
#[derive(Clone, Copy, Debug)]
pub struct Window<'a> {
    ts: &'a TimeSeries,
    start: usize,
    input_len: usize,
    horizon: usize,
}

impl<'a> Window<'a> {
    pub fn new(ts: &'a TimeSeries, start: usize, input_len: usize, horizon: usize) -> Result<Self> {
        if start + input_len + horizon > ts.n_steps() {
            return Err(Error::IndexMismatch(format!(
                "window at {start} with input {input_len} and horizon {horizon} exceeds {} steps",
                ts.n_steps()
            )));
        }
        Ok(Self {
            ts,
            start,
            input_len,
            horizon,
        })
    }

    pub fn series(&self) -> &'a TimeSeries {
        self.ts
    }

    pub fn start_index(&self) -> usize {
        self.start
    }

    pub fn origin(&self) -> usize {
        self.start + self.input_len
    }

    pub fn input_len(&self) -> usize {
        self.input_len
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_channels(&self) -> usize {
        self.ts.n_channels()
    }

    pub fn input(&self, channel: usize) -> &'a [f64] {
        &self.ts.observed(channel)[self.start..self.origin()]
    }

    /// Every observed value before the forecast origin.
    pub fn history(&self, channel: usize) -> &'a [f64] {
        &self.ts.observed(channel)[..self.origin()]
    }

    pub fn target_observed(&self, channel: usize) -> &'a [f64] {
        let o = self.origin();
        &self.ts.observed(channel)[o..o + self.horizon]
    }

    pub fn target_clean(&self, channel: usize) -> &'a [f64] {
        let o = self.origin();
        &self.ts.clean(channel)[o..o + self.horizon]
    }
}

/// Number of windows a range of `range_len` steps admits.
pub fn window_count(range_len: usize, input_len: usize, horizon: usize, stride: usize) -> usize {
    let span = input_len + horizon;
    if range_len < span || stride == 0 {
        0
    } else {
        (range_len - span) / stride + 1
    }
}

pub fn make_windows<'a>(
    ts: &'a TimeSeries,
    range: Range<usize>,
    input_len: usize,
    horizon: usize,
    stride: usize,
) -> Result<Vec<Window<'a>>> {
    if stride == 0 {
        return Err(Error::Param("stride must be at least 1".into()));
    }
    if range.end > ts.n_steps() {
        return Err(Error::IndexMismatch(format!(
            "range {range:?} exceeds series of {} steps",
            ts.n_steps()
        )));
    }
    let count = window_count(range.len(), input_len, horizon, stride);
    if count == 0 {
        return Err(Error::PartitionTooSmall {
            partition: "window range",
            len: range.len(),
            needed: input_len + horizon,
        });
    }
    Ok((0..count)
        .map(|k| Window {
            ts,
            start: range.start + k * stride,
            input_len,
            horizon,
        })
        .collect())
}

/// Per-channel z-score transform fitted on a training range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    /// Channels whose training std was zero; their std was replaced by 1.
    pub degenerate_channels: Vec<usize>,
}

impl Normalizer {
    pub fn fit(ts: &TimeSeries, range: Range<usize>) -> Result<Self> {
        if range.is_empty() || range.end > ts.n_steps() {
            return Err(Error::Param(format!(
                "cannot fit normalizer on range {range:?}"
            )));
        }
        let mut mean = Vec::with_capacity(ts.n_channels());
        let mut std = Vec::with_capacity(ts.n_channels());
        let mut degenerate_channels = Vec::new();
        for ch in 0..ts.n_channels() {
            let values = &ts.observed(ch)[range.clone()];
            let (m, s) = mean_std(values);
            mean.push(m);
            if s > 0.0 {
                std.push(s);
            } else {
                degenerate_channels.push(ch);
                std.push(1.0);
            }
        }
        Ok(Self {
            mean,
            std,
            degenerate_channels,
        })
    }

    /// A transform that leaves values unchanged.
    pub fn identity(n_channels: usize) -> Self {
        Self {
            mean: vec![0.0; n_channels],
            std: vec![1.0; n_channels],
            degenerate_channels: Vec::new(),
        }
    }

    pub fn apply(&self, channel: usize, value: f64) -> f64 {
        (value - self.mean[channel]) / self.std[channel]
    }

    pub fn invert(&self, channel: usize, value: f64) -> f64 {
        value * self.std[channel] + self.mean[channel]
    }

    pub fn apply_slice(&self, channel: usize, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| self.apply(channel, *v)).collect()
    }

    pub fn invert_slice(&self, channel: usize, values: &[f64]) -> Vec<f64> {
        values.iter().map(|v| self.invert(channel, *v)).collect()
    }
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
