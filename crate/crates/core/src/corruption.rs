// SPDX-License-Identifier: MIT OR Apache-2.0

//! SNR-calibrated additive noise and anomaly injection.
//!
//! Noise and anomalies only ever touch the observed channels. Anomalies are
//! confined to the leading `region_fraction` of the series.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{Stream, StreamRng};
use crate::series::{mean_std, TimeSeries};

/// Interquartile range of a standard normal divided by two.
pub const NORMAL_QUARTILE: f64 = 0.674_489_750_196_081_7;

const MAX_PULSE_ATTEMPTS: usize = 10_000;

/// σ² = Var(x) · 10^(−SNR/10).
pub fn snr_to_sigma2(signal_variance: f64, snr_db: f64) -> Result<f64> {
    if signal_variance <= 0.0 || !signal_variance.is_finite() {
        return Err(Error::ZeroVarianceSignal);
    }
    Ok(signal_variance * 10f64.powf(-snr_db / 10.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case")]
pub enum NoiseDist {
    Gaussian,
    Uniform,
    Laplace,
    StudentT { df: f64 },
    LevyStable { alpha: f64, beta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    #[serde(flatten)]
    pub dist: NoiseDist,
    /// `None` leaves the series untouched.
    #[serde(default)]
    pub snr_db: Option<f64>,
}

impl NoiseSpec {
    pub fn new(dist: NoiseDist, snr_db: f64) -> Self {
        Self {
            dist,
            snr_db: Some(snr_db),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.dist {
            NoiseDist::StudentT { df } if !(df > 2.0 && df.is_finite()) => Err(Error::Param(
                format!("student_t df must exceed 2 for variance matching, got {df}"),
            )),
            NoiseDist::LevyStable { alpha, beta } => check_stable(alpha, beta),
            _ => Ok(()),
        }
    }
}

fn check_stable(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Param(format!(
            "stable alpha must lie in (0, 2], got {alpha}"
        )));
    }
    if !(-1.0..=1.0).contains(&beta) {
        return Err(Error::Param(format!(
            "stable beta must lie in [-1, 1], got {beta}"
        )));
    }
    Ok(())
}

/// Per-channel record of the noise that was added.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseRecord {
    pub spec: NoiseSpec,
    pub signal_variance: Vec<f64>,
    pub sigma2: Vec<f64>,
    /// Lévy only: multiplier applied to the standard stable draws.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levy_scale: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<String>,
}

/// Standard stable samples via the Chambers–Mallows–Stuck transform.
pub fn sample_levy_stable(
    alpha: f64,
    beta: f64,
    n: usize,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    check_stable(alpha, beta)?;
    let out = (0..n)
        .map(|_| {
            let v = PI * (rng.random::<f64>() - 0.5);
            let w: f64 = Exp1.sample(rng);
            cms(alpha, beta, v, w)
        })
        .collect();
    Ok(out)
}

fn cms(alpha: f64, beta: f64, v: f64, w: f64) -> f64 {
    if (alpha - 1.0).abs() < 1e-12 {
        let pb = FRAC_PI_2 + beta * v;
        return (pb * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / pb).ln()) / FRAC_PI_2;
    }
    let zeta = beta * (PI * alpha / 2.0).tan();
    let b = zeta.atan() / alpha;
    let s = (1.0 + zeta * zeta).powf(1.0 / (2.0 * alpha));
    let av = alpha * (v + b);
    s * av.sin() / v.cos().powf(1.0 / alpha) * ((v - av).cos() / w).powf((1.0 - alpha) / alpha)
}

/// Type-7 (linear interpolation) sample quantile.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(v.len() - 1);
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

fn draw_noise(
    dist: &NoiseDist,
    sigma: f64,
    n: usize,
    rng: &mut StreamRng,
) -> Result<(Vec<f64>, Option<f64>)> {
    let out = match *dist {
        NoiseDist::Gaussian => (0..n)
            .map(|_| sigma * Distribution::<f64>::sample(&StandardNormal, rng))
            .collect(),
        NoiseDist::Uniform => {
            let a = sigma * 3f64.sqrt();
            (0..n)
                .map(|_| a * (2.0 * rng.random::<f64>() - 1.0))
                .collect()
        }
        NoiseDist::Laplace => {
            let b = sigma / 2f64.sqrt();
            (0..n)
                .map(|_| {
                    let u = rng.random::<f64>() - 0.5;
                    -b * u.signum() * (1.0 - 2.0 * u.abs()).ln()
                })
                .collect()
        }
        NoiseDist::StudentT { df } => {
            let t = StudentT::new(df).map_err(|e| Error::Param(format!("student_t: {e}")))?;
            let scale = sigma * ((df - 2.0) / df).sqrt();
            (0..n).map(|_| scale * t.sample(rng)).collect()
        }
        NoiseDist::LevyStable { alpha, beta } => {
            let raw = sample_levy_stable(alpha, beta, n, rng)?;
            let iqr = quantile(&raw, 0.75) - quantile(&raw, 0.25);
            if !(iqr > 0.0) {
                return Err(Error::Param(
                    "stable draws have zero interquartile range".into(),
                ));
            }
            let scale = 2.0 * NORMAL_QUARTILE * sigma / iqr;
            return Ok((raw.into_iter().map(|x| scale * x).collect(), Some(scale)));
        }
    };
    Ok((out, None))
}

/// Adds noise to every observed channel at the requested SNR relative to that
/// channel's clean variance. Channel `c` draws from `Stream::Noise(c)`.
pub fn add_noise(
    ts: &TimeSeries,
    spec: &NoiseSpec,
    seed: u64,
) -> Result<(TimeSeries, Option<NoiseRecord>)> {
    spec.validate()?;
    let Some(snr_db) = spec.snr_db else {
        return Ok((ts.clone(), None));
    };
    let n = ts.n_steps();
    let mut observed = ts.observed_channels().to_vec();
    let mut variances = Vec::new();
    let mut sigma2s = Vec::new();
    let mut scales = Vec::new();
    for (ch, obs) in observed.iter_mut().enumerate() {
        let (_, std) = mean_std(ts.clean(ch));
        let var = std * std;
        let sigma2 = snr_to_sigma2(var, snr_db)?;
        let mut rng = StreamRng::for_stream(seed, Stream::Noise(ch as u32));
        let (eps, scale) = draw_noise(&spec.dist, sigma2.sqrt(), n, &mut rng)?;
        for (o, e) in obs.iter_mut().zip(&eps) {
            *o += e;
        }
        variances.push(var);
        sigma2s.push(sigma2);
        scales.extend(scale);
    }
    let levy = matches!(spec.dist, NoiseDist::LevyStable { .. });
    let record = NoiseRecord {
        spec: spec.clone(),
        signal_variance: variances,
        sigma2: sigma2s,
        levy_scale: levy.then_some(scales),
        calibration: levy
            .then(|| "interquartile range matched to a gaussian of the target sigma".to_string()),
    };
    Ok((ts.clone().with_observed(observed)?, Some(record)))
}

fn default_sigma_mult() -> f64 {
    5.0
}
fn default_width() -> usize {
    5
}
fn default_magnitude_mult() -> f64 {
    3.0
}
fn default_at_fraction() -> f64 {
    0.5
}
fn default_region_fraction() -> f64 {
    0.8
}

/// Anomaly magnitudes are multiples of the clean channel's standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnomalyKind {
    Point {
        rate: f64,
        #[serde(default = "default_sigma_mult")]
        sigma_mult: f64,
    },
    Pulse {
        count: usize,
        #[serde(default = "default_width")]
        width: usize,
        #[serde(default = "default_magnitude_mult")]
        magnitude_mult: f64,
    },
    MeanShift {
        level_mult: f64,
        #[serde(default = "default_at_fraction")]
        at_fraction: f64,
    },
    /// The ramp reaches `slope_mult` standard deviations at the region end.
    TrendShift {
        slope_mult: f64,
        #[serde(default = "default_at_fraction")]
        at_fraction: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnomalySpec {
    #[serde(flatten)]
    pub kind: AnomalyKind,
    #[serde(default = "default_region_fraction")]
    pub region_fraction: f64,
}

impl AnomalySpec {
    pub fn new(kind: AnomalyKind) -> Self {
        Self {
            kind,
            region_fraction: default_region_fraction(),
        }
    }

    pub fn region_len(&self, n: usize) -> usize {
        (self.region_fraction * n as f64).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.region_fraction > 0.0 && self.region_fraction <= 1.0) {
            return Err(Error::Param(format!(
                "region_fraction must lie in (0, 1], got {}",
                self.region_fraction
            )));
        }
        match self.kind {
            AnomalyKind::Point { rate, .. } if !(0.0..=0.5).contains(&rate) => Err(Error::Param(
                format!("point anomaly rate must lie in [0, 0.5], got {rate}"),
            )),
            AnomalyKind::Pulse {
                width: 0, count, ..
            } if count > 0 => Err(Error::Param("pulse width must be at least 1".into())),
            AnomalyKind::MeanShift { at_fraction, .. }
            | AnomalyKind::TrendShift { at_fraction, .. }
                if !(0.0..1.0).contains(&at_fraction) =>
            {
                Err(Error::Param(format!(
                    "at_fraction must lie in [0, 1), got {at_fraction}"
                )))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnomalyRecord {
    pub spec: AnomalySpec,
    pub channel: usize,
    pub region_len: usize,
    /// Point indices, pulse starts, or the shift onset.
    pub positions: Vec<usize>,
    pub magnitudes: Vec<f64>,
}

fn pulse_starts(
    count: usize,
    width: usize,
    region: usize,
    rng: &mut StreamRng,
) -> Result<Vec<usize>> {
    let overflow = Error::RegionOverflow {
        count,
        width,
        region,
    };
    // Disjoint runs need a gap of one step so they do not merge.
    if count == 0 {
        return Ok(Vec::new());
    }
    if count * (width + 1) > region + 1 {
        return Err(overflow);
    }
    let mut starts: Vec<usize> = Vec::with_capacity(count);
    let mut attempts = 0;
    while starts.len() < count {
        attempts += 1;
        if attempts > MAX_PULSE_ATTEMPTS {
            return Err(overflow);
        }
        let s = rng.random_range(0..=region - width);
        if starts.iter().all(|&e| s + width < e || e + width < s) {
            starts.push(s);
        }
    }
    starts.sort_unstable();
    Ok(starts)
}

fn inject_channel(
    values: &mut [f64],
    std: f64,
    spec: &AnomalySpec,
    rng: &mut StreamRng,
) -> Result<(Vec<usize>, Vec<f64>)> {
    let n = values.len();
    let region = spec.region_len(n);
    let mut positions = Vec::new();
    let mut magnitudes = Vec::new();
    match spec.kind {
        AnomalyKind::Point { rate, sigma_mult } => {
            let count = (rate * region as f64).round() as usize;
            let mut idx = rand::seq::index::sample(rng, region, count).into_vec();
            idx.sort_unstable();
            for i in idx {
                let z: f64 = StandardNormal.sample(rng);
                let d = sigma_mult * std * z;
                values[i] += d;
                positions.push(i);
                magnitudes.push(d);
            }
        }
        AnomalyKind::Pulse {
            count,
            width,
            magnitude_mult,
        } => {
            for (k, s) in pulse_starts(count, width, region, rng)?
                .into_iter()
                .enumerate()
            {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let g = sign * magnitude_mult * std;
                for v in &mut values[s..s + width] {
                    *v += g;
                }
                positions.push(s);
                magnitudes.push(g);
            }
        }
        AnomalyKind::MeanShift {
            level_mult,
            at_fraction,
        } => {
            let at = shift_onset(at_fraction, n, region)?;
            let level = level_mult * std;
            for v in &mut values[at..region] {
                *v += level;
            }
            positions.push(at);
            magnitudes.push(level);
        }
        AnomalyKind::TrendShift {
            slope_mult,
            at_fraction,
        } => {
            let at = shift_onset(at_fraction, n, region)?;
            let slope = slope_mult * std / (region - at) as f64;
            for (k, v) in values[at..region].iter_mut().enumerate() {
                *v += slope * k as f64;
            }
            positions.push(at);
            magnitudes.push(slope);
        }
    }
    Ok((positions, magnitudes))
}

fn shift_onset(at_fraction: f64, n: usize, region: usize) -> Result<usize> {
    let at = (at_fraction * n as f64).round() as usize;
    if at >= region {
        return Err(Error::Param(format!(
            "shift onset {at} lies outside the anomaly region of {region} steps"
        )));
    }
    Ok(at)
}

/// Injects every anomaly into every observed channel. Anomaly `k` on channel
/// `c` draws from `Stream::Anomaly((k << 16) | c)`.
pub fn inject_anomalies(
    ts: &TimeSeries,
    specs: &[AnomalySpec],
    seed: u64,
) -> Result<(TimeSeries, Vec<AnomalyRecord>)> {
    let mut observed = ts.observed_channels().to_vec();
    let mut records = Vec::new();
    for (k, spec) in specs.iter().enumerate() {
        spec.validate()?;
        for (ch, obs) in observed.iter_mut().enumerate() {
            let (_, std) = mean_std(ts.clean(ch));
            if std <= 0.0 {
                return Err(Error::ZeroVarianceSignal);
            }
            let mut rng =
                StreamRng::for_stream(seed, Stream::Anomaly(((k as u32) << 16) | ch as u32));
            let (positions, magnitudes) = inject_channel(obs, std, spec, &mut rng)?;
            records.push(AnomalyRecord {
                spec: spec.clone(),
                channel: ch,
                region_len: spec.region_len(ts.n_steps()),
                positions,
                magnitudes,
            });
        }
    }
    Ok((ts.clone().with_observed(observed)?, records))
}
