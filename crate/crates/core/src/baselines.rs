// SPDX-License-Identifier: MIT OR Apache-2.0

//! Classical reference forecasters.
//!
//! Naive, mean, drift and seasonal-naive read the full observed history
//! before the forecast origin. The AR baseline is fitted once by Yule-Walker
//! on the fit range and then applied recursively.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BaselineSpec {
    Naive,
    Mean,
    Drift,
    SeasonalNaive {
        period: usize,
    },
    /// AR(p) by Yule-Walker; `fit_window` keeps only the most recent steps of the fit range.
    ArFit {
        p: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fit_window: Option<usize>,
    },
}

impl BaselineSpec {
    pub fn name(&self) -> String {
        match self {
            BaselineSpec::Naive => "naive".into(),
            BaselineSpec::Mean => "mean".into(),
            BaselineSpec::Drift => "drift".into(),
            BaselineSpec::SeasonalNaive { period } => format!("seasonal_naive_{period}"),
            BaselineSpec::ArFit { p, .. } => format!("ar_fit_{p}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BaselineSpec::SeasonalNaive { period: 0 } => {
                Err(Error::Param("seasonal period must be at least 1".into()))
            }
            BaselineSpec::ArFit { p: 0, .. } => {
                Err(Error::Param("AR order must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Yule-Walker estimate for one channel.
#[derive(Clone, Debug, PartialEq)]
pub struct ArModel {
    pub mean: f64,
    pub phi: Vec<f64>,
    pub sigma2: f64,
}

/// Biased sample autocovariances γ_0 … γ_p.
fn autocovariances(x: &[f64], mean: f64, p: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (0..=p)
        .map(|k| {
            x[k..]
                .iter()
                .zip(x)
                .map(|(a, b)| (a - mean) * (b - mean))
                .sum::<f64>()
                / n
        })
        .collect()
}

/// Solves the Yule-Walker equations with the Durbin-Levinson recursion.
pub fn fit_yule_walker(x: &[f64], p: usize) -> Result<ArModel> {
    if p == 0 {
        return Err(Error::Param("AR order must be at least 1".into()));
    }
    if x.len() <= 10 * p {
        return Err(Error::InsufficientHistory {
            needed: 10 * p + 1,
            available: x.len(),
        });
    }
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let gamma = autocovariances(x, mean, p);
    if !(gamma[0] > 0.0) {
        return Err(Error::SingularAutocovariance);
    }
    let mut phi: Vec<f64> = Vec::with_capacity(p);
    let mut v = gamma[0];
    for k in 1..=p {
        let acc: f64 = (1..k).map(|j| phi[j - 1] * gamma[k - j]).sum();
        let kappa = (gamma[k] - acc) / v;
        if !kappa.is_finite() || kappa.abs() >= 1.0 {
            return Err(Error::SingularAutocovariance);
        }
        let prev = phi.clone();
        for j in 1..k {
            phi[j - 1] = prev[j - 1] - kappa * prev[k - j - 1];
        }
        phi.push(kappa);
        v *= 1.0 - kappa * kappa;
    }
    Ok(ArModel {
        mean,
        phi,
        sigma2: v,
    })
}

impl ArModel {
    /// Recursive forecast for steps `origin..origin + h` from `x[..origin]`.
    pub fn forecast(&self, x: &[f64], origin: usize, h: usize) -> Vec<f64> {
        let p = self.phi.len();
        let mut fc: Vec<f64> = Vec::with_capacity(h);
        for k in 0..h {
            let mut v = self.mean;
            for i in 1..=p {
                let val = if i > k { x[origin + k - i] } else { fc[k - i] };
                v += self.phi[i - 1] * (val - self.mean);
            }
            fc.push(v);
        }
        fc
    }
}

/// A baseline prepared for one series.
#[derive(Clone, Debug)]
pub struct FittedBaseline<'a> {
    spec: BaselineSpec,
    ts: &'a TimeSeries,
    /// Per channel prefix sums of the observed values.
    prefix: Vec<Vec<f64>>,
    ar: Vec<ArModel>,
}

impl<'a> FittedBaseline<'a> {
    pub fn fit(spec: &BaselineSpec, ts: &'a TimeSeries, fit_range: Range<usize>) -> Result<Self> {
        spec.validate()?;
        let prefix = if matches!(spec, BaselineSpec::Mean) {
            (0..ts.n_channels())
                .map(|c| {
                    let mut acc = 0.0;
                    std::iter::once(0.0)
                        .chain(ts.observed(c).iter().map(|v| {
                            acc += v;
                            acc
                        }))
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        let ar = match *spec {
            BaselineSpec::ArFit { p, fit_window } => {
                let start = match fit_window {
                    Some(w) => fit_range.end.saturating_sub(w).max(fit_range.start),
                    None => fit_range.start,
                };
                (0..ts.n_channels())
                    .map(|c| fit_yule_walker(&ts.observed(c)[start..fit_range.end], p))
                    .collect::<Result<_>>()?
            }
            _ => Vec::new(),
        };
        Ok(Self {
            spec: spec.clone(),
            ts,
            prefix,
            ar,
        })
    }

    pub fn spec(&self) -> &BaselineSpec {
        &self.spec
    }

    pub fn ar_models(&self) -> &[ArModel] {
        &self.ar
    }

    /// Forecast for steps `origin..origin + h` as `[channel][step]`.
    pub fn forecast(&self, origin: usize, h: usize) -> Result<Vec<Vec<f64>>> {
        let needed = match self.spec {
            BaselineSpec::Naive | BaselineSpec::Mean => 1,
            BaselineSpec::Drift => 2,
            BaselineSpec::SeasonalNaive { period } => period,
            BaselineSpec::ArFit { p, .. } => p,
        };
        if origin < needed || origin > self.ts.n_steps() {
            return Err(Error::InsufficientHistory {
                needed,
                available: origin,
            });
        }
        let out = (0..self.ts.n_channels())
            .map(|c| {
                let x = self.ts.observed(c);
                let last = x[origin - 1];
                match self.spec {
                    BaselineSpec::Naive => vec![last; h],
                    BaselineSpec::Mean => vec![self.prefix[c][origin] / origin as f64; h],
                    BaselineSpec::Drift => {
                        let slope = (last - x[0]) / (origin - 1) as f64;
                        (1..=h).map(|k| last + k as f64 * slope).collect()
                    }
                    BaselineSpec::SeasonalNaive { period } => (0..h)
                        .map(|k| {
                            let back = period * (k / period + 1);
                            x[origin + k - back]
                        })
                        .collect(),
                    BaselineSpec::ArFit { .. } => self.ar[c].forecast(x, origin, h),
                }
            })
            .collect();
        Ok(out)
    }
}
