// SPDX-License-Identifier: MIT OR Apache-2.0

//! Noise-free signal generators: trend families, periodic waveforms and the
//! two long-range diagnostic patterns. Every output has `observed == clean`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

fn zero() -> f64 {
    0.0
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "trend", rename_all = "snake_case", deny_unknown_fields)]
pub enum Trend {
    /// a·t + b
    Linear { a: f64, b: f64 },
    /// a·t² + b·t + c
    Quadratic { a: f64, b: f64, c: f64 },
    /// a·e^(b·t)
    Exponential { a: f64, b: f64 },
    /// a·e^(−b·t)
    NegativeExponential { a: f64, b: f64 },
    /// a·ln(t) + b
    Logarithmic { a: f64, b: f64 },
    /// L / (1 + e^(−k(t − t0)))
    Logistic { l: f64, k: f64, t0: f64 },
    /// a·e^(−b·e^(−k·t))
    Gompertz { a: f64, b: f64, k: f64 },
    /// a·t^b
    PowerLaw { a: f64, b: f64 },
    /// c before t0, d from t0 on.
    Step { c: f64, d: f64, t0: f64 },
    /// Segment i is a_i·t + b_i on [breakpoints[i-1], breakpoints[i]).
    PiecewiseLinear {
        breakpoints: Vec<f64>,
        segments: Vec<[f64; 2]>,
    },
    /// a·e^(−(t − t0)² / 2σ²)
    GaussianBump { a: f64, t0: f64, sigma: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendSpec {
    #[serde(flatten)]
    pub trend: Trend,
    #[serde(default = "zero")]
    pub t_start: f64,
    #[serde(default = "one")]
    pub t_step: f64,
}

impl TrendSpec {
    pub fn new(trend: Trend) -> Self {
        Self {
            trend,
            t_start: 0.0,
            t_step: 1.0,
        }
    }

    pub fn time(&self, index: usize) -> f64 {
        self.t_start + index as f64 * self.t_step
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_step.is_finite()) {
            return Err(Error::Param("t_start and t_step must be finite".into()));
        }
        let t_first = self.time(0);
        let t_last = self.time(n.saturating_sub(1));
        let t_min = t_first.min(t_last);
        match &self.trend {
            Trend::Logarithmic { .. } if t_min <= 0.0 => Err(Error::Domain(format!(
                "logarithmic trend needs t > 0, range starts at {t_min}"
            ))),
            Trend::PowerLaw { b, .. } if t_min < 0.0 || (t_min == 0.0 && *b < 0.0) => {
                Err(Error::Domain(format!(
                    "power law needs t >= 0 (t > 0 for negative exponent), range starts at {t_min}"
                )))
            }
            Trend::Logistic { l, .. } if *l <= 0.0 => {
                Err(Error::Param("logistic capacity L must be positive".into()))
            }
            Trend::Gompertz { b, .. } if *b <= 0.0 => Err(Error::Param(
                "gompertz displacement b must be positive".into(),
            )),
            Trend::GaussianBump { sigma, .. } if *sigma <= 0.0 => Err(Error::Param(
                "gaussian bump width sigma must be positive".into(),
            )),
            Trend::PiecewiseLinear {
                breakpoints,
                segments,
            } => {
                if segments.len() != breakpoints.len() + 1 {
                    return Err(Error::Param(format!(
                        "piecewise linear needs {} segments for {} breakpoints, got {}",
                        breakpoints.len() + 1,
                        breakpoints.len(),
                        segments.len()
                    )));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Param(
                        "piecewise breakpoints must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl Trend {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Trend::Linear { a, b } => a * t + b,
            Trend::Quadratic { a, b, c } => a * t * t + b * t + c,
            Trend::Exponential { a, b } => a * (b * t).exp(),
            Trend::NegativeExponential { a, b } => a * (-b * t).exp(),
            Trend::Logarithmic { a, b } => a * t.ln() + b,
            Trend::Logistic { l, k, t0 } => l / (1.0 + (-k * (t - t0)).exp()),
            Trend::Gompertz { a, b, k } => a * (-b * (-k * t).exp()).exp(),
            Trend::PowerLaw { a, b } => a * t.powf(*b),
            Trend::Step { c, d, t0 } => {
                if t < *t0 {
                    *c
                } else {
                    *d
                }
            }
            Trend::PiecewiseLinear {
                breakpoints,
                segments,
            } => {
                let seg = breakpoints.partition_point(|bp| *bp <= t);
                let [a, b] = segments[seg];
                a * t + b
            }
            Trend::GaussianBump { a, t0, sigma } => {
                a * (-(t - t0).powi(2) / (2.0 * sigma * sigma)).exp()
            }
        }
    }
}

pub fn gen_trend(spec: &TrendSpec, n: usize) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::Param("n must be positive".into()));
    }
    spec.validate(n)?;
    let values: Vec<f64> = (0..n).map(|i| spec.trend.value(spec.time(i))).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "trend value at index {i} is not finite; reduce the rate parameters"
        )));
    }
    TimeSeries::deterministic("value", values)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineComponent {
    pub amplitude: f64,
    /// Cycles per step.
    pub frequency: f64,
    #[serde(default)]
    pub phase: f64,
}

impl SineComponent {
    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * (2.0 * PI * self.frequency * t + self.phase).sin()
    }
}

fn default_exp_sine_frequency() -> f64 {
    1.0 / (2.0 * PI)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "wave", rename_all = "snake_case", deny_unknown_fields)]
pub enum PeriodicSpec {
    Sine {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// (2A/π)·arcsin(sin(2πft))
    Triangle {
        amplitude: f64,
        frequency: f64,
    },
    /// A·sgn(sin(2πft))
    Square {
        amplitude: f64,
        frequency: f64,
    },
    /// 2A(t/T − ⌊t/T + 1/2⌋)
    Sawtooth {
        amplitude: f64,
        period: f64,
    },
    CompositeSine {
        components: Vec<SineComponent>,
    },
    /// A·e^(sin(2πft + φ)); the defaults give e^(sin t).
    ExpSine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "default_exp_sine_frequency")]
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
}

impl PeriodicSpec {
    fn validate(&self) -> Result<()> {
        let check_f = |f: f64| {
            if f > 0.0 && f.is_finite() {
                Ok(())
            } else {
                Err(Error::Param(format!("frequency must be positive, got {f}")))
            }
        };
        match self {
            PeriodicSpec::Sine { frequency, .. }
            | PeriodicSpec::Triangle { frequency, .. }
            | PeriodicSpec::Square { frequency, .. }
            | PeriodicSpec::ExpSine { frequency, .. } => check_f(*frequency),
            PeriodicSpec::Sawtooth { period, .. } => {
                if *period > 0.0 && period.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Param(format!(
                        "sawtooth period must be positive, got {period}"
                    )))
                }
            }
            PeriodicSpec::CompositeSine { components } => {
                if components.len() < 2 {
                    return Err(Error::Param(
                        "composite sine needs at least two components".into(),
                    ));
                }
                components.iter().try_for_each(|c| check_f(c.frequency))
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            PeriodicSpec::Sine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * t + phase).sin(),
            PeriodicSpec::Triangle {
                amplitude,
                frequency,
            } => 2.0 * amplitude / PI * (2.0 * PI * frequency * t).sin().asin(),
            PeriodicSpec::Square {
                amplitude,
                frequency,
            } => amplitude * sgn((2.0 * PI * frequency * t).sin()),
            PeriodicSpec::Sawtooth { amplitude, period } => {
                2.0 * amplitude * (t / period - (t / period + 0.5).floor())
            }
            PeriodicSpec::CompositeSine { components } => {
                let mut it = components.iter();
                let first = it.next().map(|c| c.value(t)).unwrap_or(0.0);
                it.fold(first, |acc, c| acc + c.value(t))
            }
            PeriodicSpec::ExpSine {
                amplitude,
                frequency,
                phase,
            } => amplitude * (2.0 * PI * frequency * t + phase).sin().exp(),
        }
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Periodic waveform sampled at integer steps t = 0, 1, ….
pub fn gen_periodic(spec: &PeriodicSpec, n: usize) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::Param("n must be positive".into()));
    }
    spec.validate()?;
    TimeSeries::deterministic("value", (0..n).map(|i| spec.value(i as f64)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LongDependencyPattern {
    /// Triangle wave, period 400, range [−1, 1].
    Triangle400,
    /// Spikes every 96 steps with alternating heights.
    Pulse96,
}

pub const TRIANGLE_PERIOD: usize = 400;
pub const PULSE_INTERVAL: usize = 96;
pub const PULSE_OFFSET: usize = 48;
pub const PULSE_LEVELS: [f64; 2] = [1.0, 0.5];

impl LongDependencyPattern {
    pub fn value(self, index: usize) -> f64 {
        match self {
            LongDependencyPattern::Triangle400 => {
                let quarter = (TRIANGLE_PERIOD / 4) as f64;
                let phase = (index % TRIANGLE_PERIOD) as f64;
                if phase <= quarter {
                    phase / quarter
                } else if phase <= 3.0 * quarter {
                    2.0 - phase / quarter
                } else {
                    phase / quarter - 4.0
                }
            }
            LongDependencyPattern::Pulse96 => {
                if index % PULSE_INTERVAL == PULSE_OFFSET {
                    PULSE_LEVELS[(index / PULSE_INTERVAL) % 2]
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn gen_long_dependency_pattern(pattern: LongDependencyPattern, n: usize) -> Result<TimeSeries> {
    if n == 0 {
        return Err(Error::Param("n must be positive".into()));
    }
    TimeSeries::deterministic("value", (0..n).map(|i| pattern.value(i)).collect())
}
