// SPDX-License-Identifier: MIT OR Apache-2.0

//! Theoretical-optimum forecasts.
//!
//! Each channel carries an [`OracleClass`] naming the rule that produces the
//! minimum-MSE forecast given full knowledge of the generating process.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multivar::CoupledSystem;
use crate::series::{TimeSeries, Window};
use crate::stochastic::ArmaSpec;

/// Innovations larger than this are treated as a diverging reconstruction.
const INNOVATION_LIMIT: f64 = 1e12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum OracleClass {
    /// Future clean values are known exactly.
    Deterministic,
    /// Forecast the process mean.
    WhiteNoise { mean: f64 },
    /// Forecast the last observed value.
    RandomWalk,
    /// Conditional expectation under the true ARMA parameters.
    Arma { spec: ArmaSpec },
    /// Forecast the clean signal; observations add zero-mean noise.
    NoisySignal,
    /// Forecast the clean channel. With `martingale_residual`, the residual
    /// `observed − clean` is a martingale and its last value is carried forward.
    ComplexPredictable {
        #[serde(default)]
        martingale_residual: bool,
    },
    /// Joint conditional expectation of a lag-coupled system.
    Coupled,
}

impl OracleClass {
    /// True when the oracle forecast equals the clean target exactly.
    pub fn has_zero_true_error(&self) -> bool {
        matches!(
            self,
            OracleClass::Deterministic
                | OracleClass::NoisySignal
                | OracleClass::ComplexPredictable {
                    martingale_residual: false
                }
        )
    }
}

/// ψ_0 … ψ_{h−1} of the MA(∞) representation.
pub fn psi_weights(spec: &ArmaSpec, h: usize) -> Vec<f64> {
    let a = spec.ar_coefficients();
    let mut psi = Vec::with_capacity(h);
    for j in 0..h {
        if j == 0 {
            psi.push(1.0);
            continue;
        }
        let mut v = spec.theta.get(j - 1).copied().unwrap_or(0.0);
        for i in 1..=j.min(a.len()) {
            v += a[i - 1] * psi[j - i];
        }
        psi.push(v);
    }
    psi
}

/// σ²·Σ_{j<k} ψ_j² for k = 1..=h.
pub fn arma_error_variances(spec: &ArmaSpec, h: usize) -> Vec<f64> {
    let s2 = spec.sigma * spec.sigma;
    let mut acc = 0.0;
    psi_weights(spec, h)
        .into_iter()
        .map(|p| {
            acc += p * p;
            s2 * acc
        })
        .collect()
}

/// Inverts the ARMA recursion over `x` from its first sample. Pre-sample
/// values sit at the process mean and pre-sample innovations at zero.
pub fn reconstruct_innovations(spec: &ArmaSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.check_invertible()?;
    let a = spec.ar_coefficients();
    let mean = spec.process_mean();
    let mut eps = Vec::with_capacity(x.len());
    for t in 0..x.len() {
        let mut v = x[t] - spec.mu;
        for (i, ai) in a.iter().enumerate() {
            let lag = i + 1;
            v -= ai * if t >= lag { x[t - lag] } else { mean };
        }
        for (j, th) in spec.theta.iter().enumerate() {
            let lag = j + 1;
            if t >= lag {
                v -= th * eps[t - lag];
            }
        }
        if !v.is_finite() || v.abs() > INNOVATION_LIMIT {
            return Err(Error::InnovationReconstructionFailure { index: t });
        }
        eps.push(v);
    }
    Ok(eps)
}

/// h-step conditional expectations given `x[..origin]` and its innovations.
fn arma_forecast_from(
    spec: &ArmaSpec,
    x: &[f64],
    eps: &[f64],
    origin: usize,
    h: usize,
) -> Vec<f64> {
    let a = spec.ar_coefficients();
    let mean = spec.process_mean();
    let mut fc = Vec::with_capacity(h);
    for k in 0..h {
        let t = origin + k;
        let mut v = spec.mu;
        for (i, ai) in a.iter().enumerate() {
            let lag = i + 1;
            let val = if lag > k {
                if t >= lag {
                    x[t - lag]
                } else {
                    mean
                }
            } else {
                fc[k - lag]
            };
            v += ai * val;
        }
        for (j, th) in spec.theta.iter().enumerate() {
            let lag = j + 1;
            if lag > k && t >= lag {
                v += th * eps[t - lag];
            }
        }
        fc.push(v);
    }
    fc
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArmaForecast {
    pub mean: Vec<f64>,
    pub error_variance: Vec<f64>,
}

/// Forecasts `h` steps past the end of `history`.
pub fn arma_h_step(spec: &ArmaSpec, history: &[f64], h: usize) -> Result<ArmaForecast> {
    let eps = reconstruct_innovations(spec, history)?;
    Ok(ArmaForecast {
        mean: arma_forecast_from(spec, history, &eps, history.len(), h),
        error_variance: arma_error_variances(spec, h),
    })
}

/// Oracle for one dataset with any per-window precomputation done once.
#[derive(Clone, Debug)]
pub struct PreparedOracle<'a> {
    ts: &'a TimeSeries,
    classes: Vec<OracleClass>,
    system: Option<CoupledSystem>,
    innovations: Vec<Option<Vec<f64>>>,
}

impl<'a> PreparedOracle<'a> {
    pub fn new(
        ts: &'a TimeSeries,
        classes: &[OracleClass],
        system: Option<&CoupledSystem>,
    ) -> Result<Self> {
        if classes.len() != ts.n_channels() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} oracle classes", ts.n_channels()),
                found: format!("{}", classes.len()),
            });
        }
        if classes.contains(&OracleClass::Coupled) && system.is_none() {
            return Err(Error::Config(
                "coupled oracle class without a coupled system".into(),
            ));
        }
        let innovations = classes
            .iter()
            .enumerate()
            .map(|(ch, c)| match c {
                OracleClass::Arma { spec } => {
                    reconstruct_innovations(spec, ts.observed(ch)).map(Some)
                }
                _ => Ok(None),
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            ts,
            classes: classes.to_vec(),
            system: system.cloned(),
            innovations,
        })
    }

    pub fn classes(&self) -> &[OracleClass] {
        &self.classes
    }

    /// Forecast for steps `origin..origin + h`, as `[channel][step]`.
    pub fn forecast(&self, origin: usize, h: usize) -> Result<Vec<Vec<f64>>> {
        let ts = self.ts;
        if origin == 0 || origin + h > ts.n_steps() {
            return Err(Error::InsufficientHistory {
                needed: origin + h,
                available: ts.n_steps(),
            });
        }
        let coupled = match (&self.system, self.classes.contains(&OracleClass::Coupled)) {
            (Some(sys), true) => Some(sys.forecast(ts.observed_channels(), origin, h)?),
            _ => None,
        };
        let mut out = Vec::with_capacity(ts.n_channels());
        for (ch, class) in self.classes.iter().enumerate() {
            let clean_future = || ts.clean(ch)[origin..origin + h].to_vec();
            let fc = match class {
                OracleClass::Deterministic
                | OracleClass::NoisySignal
                | OracleClass::ComplexPredictable {
                    martingale_residual: false,
                } => clean_future(),
                OracleClass::ComplexPredictable {
                    martingale_residual: true,
                } => {
                    let resid = ts.observed(ch)[origin - 1] - ts.clean(ch)[origin - 1];
                    clean_future().into_iter().map(|c| c + resid).collect()
                }
                OracleClass::WhiteNoise { mean } => vec![*mean; h],
                OracleClass::RandomWalk => vec![ts.observed(ch)[origin - 1]; h],
                OracleClass::Arma { spec } => {
                    let eps = self.innovations[ch]
                        .as_ref()
                        .expect("innovations precomputed");
                    arma_forecast_from(spec, ts.observed(ch), eps, origin, h)
                }
                OracleClass::Coupled => {
                    coupled.as_ref().expect("coupled forecast computed")[ch].clone()
                }
            };
            out.push(fc);
        }
        Ok(out)
    }
}

/// One-off oracle forecast for a single window.
pub fn optimal_forecast(
    window: &Window,
    classes: &[OracleClass],
    system: Option<&CoupledSystem>,
) -> Result<Vec<Vec<f64>>> {
    PreparedOracle::new(window.series(), classes, system)?
        .forecast(window.origin(), window.horizon())
}
