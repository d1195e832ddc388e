// SPDX-License-Identifier: MIT OR Apache-2.0

//! Lag-coupled channel systems.
//!
//! Channel `c` evolves as
//! `x_c(t) = mean_c + seasonal_c(t) + Σ gain · g(x_src(t − lag)) + σ_c ε_c(t)`
//! with every lag at least one step. The clean channel is the one-step
//! conditional expectation, i.e. everything except `σ_c ε_c(t)`.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng::{Stream, StreamRng};
use crate::series::TimeSeries;
use crate::signal::SineComponent;
use crate::stochastic::DEFAULT_BURN_IN;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "fn", rename_all = "snake_case")]
pub enum Response {
    #[default]
    Linear,
    Sin,
    Square,
    Cube,
    Abs,
    /// `above[0]·x + above[1]` when `x > tau`, else `below[0]·x + below[1]`.
    Threshold {
        tau: f64,
        above: [f64; 2],
        below: [f64; 2],
    },
}

impl Response {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Response::Linear => x,
            Response::Sin => x.sin(),
            Response::Square => x * x,
            Response::Cube => x * x * x,
            Response::Abs => x.abs(),
            Response::Threshold { tau, above, below } => {
                let [a, b] = if x > *tau { above } else { below };
                a * x + b
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Response::Linear)
    }

    /// E[g(X)] for X ~ N(m, s²).
    pub fn expect_normal(&self, m: f64, s: f64) -> f64 {
        if s == 0.0 {
            return self.apply(m);
        }
        let s2 = s * s;
        let std = Normal::standard();
        match self {
            Response::Linear => m,
            Response::Sin => m.sin() * (-s2 / 2.0).exp(),
            Response::Square => m * m + s2,
            Response::Cube => m * m * m + 3.0 * m * s2,
            Response::Abs => {
                let z = m / s;
                s * std.pdf(z) * 2.0 + m * (1.0 - 2.0 * std.cdf(-z))
            }
            Response::Threshold { tau, above, below } => {
                let z = (tau - m) / s;
                let p_below = std.cdf(z);
                let p_above = 1.0 - p_below;
                let tail = s * std.pdf(z);
                let ex_above = m * p_above + tail;
                let ex_below = m * p_below - tail;
                above[0] * ex_above + above[1] * p_above + below[0] * ex_below + below[1] * p_below
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingTerm {
    pub source: usize,
    pub lag: usize,
    pub gain: f64,
    #[serde(default)]
    pub response: Response,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub name: String,
    #[serde(default)]
    pub mean: f64,
    #[serde(default)]
    pub seasonal: Vec<SineComponent>,
    #[serde(default)]
    pub terms: Vec<CouplingTerm>,
    #[serde(default)]
    pub sigma: f64,
}

impl ChannelSpec {
    pub fn base(&self, t: f64) -> f64 {
        self.seasonal
            .iter()
            .fold(self.mean, |acc, s| acc + s.value(t))
    }

    pub fn is_exogenous(&self) -> bool {
        self.terms.is_empty()
    }
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledSystem {
    pub channels: Vec<ChannelSpec>,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

impl CoupledSystem {
    pub fn new(channels: Vec<ChannelSpec>) -> Self {
        Self {
            channels,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn max_lag(&self) -> usize {
        self.channels
            .iter()
            .flat_map(|c| c.terms.iter().map(|t| t.lag))
            .max()
            .unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let n_ch = self.channels.len();
        if n_ch == 0 {
            return Err(Error::Param(
                "coupled system needs at least one channel".into(),
            ));
        }
        for ch in &self.channels {
            if !(ch.sigma >= 0.0 && ch.sigma.is_finite()) {
                return Err(Error::Param(format!(
                    "channel `{}` sigma must be non-negative",
                    ch.name
                )));
            }
            for term in &ch.terms {
                if term.lag == 0 {
                    return Err(Error::Param(format!(
                        "channel `{}` has a lag-0 coupling",
                        ch.name
                    )));
                }
                let src = self.channels.get(term.source).ok_or_else(|| {
                    Error::Param(format!(
                        "channel `{}` couples to missing source {}",
                        ch.name, term.source
                    ))
                })?;
                if !term.response.is_linear() && !src.is_exogenous() {
                    return Err(Error::Param(format!(
                        "channel `{}`: nonlinear responses need an exogenous source, `{}` has couplings",
                        ch.name, src.name
                    )));
                }
            }
        }
        let modulus = self.spectral_radius();
        if modulus >= 1.0 - 1e-9 {
            return Err(Error::NonStationary { modulus });
        }
        Ok(())
    }

    /// Spectral radius of the companion matrix of the linear couplings.
    pub fn spectral_radius(&self) -> f64 {
        let c = self.channels.len();
        let l = self
            .channels
            .iter()
            .flat_map(|ch| {
                ch.terms
                    .iter()
                    .filter(|t| t.response.is_linear())
                    .map(|t| t.lag)
            })
            .max()
            .unwrap_or(0);
        if l == 0 {
            return 0.0;
        }
        let dim = c * l;
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for (i, ch) in self.channels.iter().enumerate() {
            for t in ch.terms.iter().filter(|t| t.response.is_linear()) {
                m[(i, (t.lag - 1) * c + t.source)] += t.gain;
            }
        }
        for k in c..dim {
            m[(k, k - c)] = 1.0;
        }
        m.complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// The same system with every coupling gain set to zero.
    pub fn decoupled(&self) -> Self {
        let mut out = self.clone();
        for ch in &mut out.channels {
            for t in &mut ch.terms {
                t.gain = 0.0;
            }
        }
        out
    }

    /// Channel `c` draws its innovations from `Stream::Generator(c)`.
    pub fn generate(&self, n: usize, seed: u64) -> Result<TimeSeries> {
        self.validate()?;
        let burn = self.burn_in;
        let total = burn + n;
        let eps: Vec<Vec<f64>> = (0..self.channels.len())
            .map(|c| {
                let mut rng = StreamRng::for_stream(seed, Stream::Generator(c as u32));
                (0..total)
                    .map(|_| Distribution::<f64>::sample(&StandardNormal, &mut rng))
                    .collect()
            })
            .collect();
        let mut x = vec![vec![0.0; total]; self.channels.len()];
        let mut clean = vec![vec![0.0; total]; self.channels.len()];
        for t in 0..total {
            let time = t as f64 - burn as f64;
            for (c, ch) in self.channels.iter().enumerate() {
                let mut v = ch.base(time);
                for term in &ch.terms {
                    let src = if t >= term.lag {
                        x[term.source][t - term.lag]
                    } else {
                        self.channels[term.source].base(time - term.lag as f64)
                    };
                    v += term.gain * term.response.apply(src);
                }
                clean[c][t] = v;
                x[c][t] = v + ch.sigma * eps[c][t];
            }
        }
        let names = self.channels.iter().map(|c| c.name.clone()).collect();
        TimeSeries::new(
            names,
            x.into_iter().map(|v| v[burn..].to_vec()).collect(),
            clean.into_iter().map(|v| v[burn..].to_vec()).collect(),
        )
    }

    /// Conditional expectation of every channel for steps `origin..origin + horizon`
    /// given observations before `origin`. Returns `[channel][step]`.
    pub fn forecast(
        &self,
        observed: &[Vec<f64>],
        origin: usize,
        horizon: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let lag = self.max_lag();
        if origin < lag {
            return Err(Error::InsufficientHistory {
                needed: lag,
                available: origin,
            });
        }
        let mut fc = vec![Vec::with_capacity(horizon); self.channels.len()];
        for s in origin..origin + horizon {
            for (c, ch) in self.channels.iter().enumerate() {
                let mut v = ch.base(s as f64);
                for term in &ch.terms {
                    let j = s - term.lag;
                    let e = if j < origin {
                        term.response.apply(observed[term.source][j])
                    } else if term.response.is_linear() {
                        fc[term.source][j - origin]
                    } else {
                        let src = &self.channels[term.source];
                        term.response.expect_normal(src.base(j as f64), src.sigma)
                    };
                    v += term.gain * e;
                }
                fc[c].push(v);
            }
        }
        Ok(fc)
    }
}

/// White-noise `var1` and its exact copy `var2` delayed by `lag` steps.
pub fn lagged_pair_system(lag: usize, sigma: f64) -> CoupledSystem {
    CoupledSystem::new(vec![
        ChannelSpec {
            name: "var1".into(),
            mean: 0.0,
            seasonal: Vec::new(),
            terms: Vec::new(),
            sigma,
        },
        ChannelSpec {
            name: "var2".into(),
            mean: 0.0,
            seasonal: Vec::new(),
            terms: vec![CouplingTerm {
                source: 0,
                lag,
                gain: 1.0,
                response: Response::Linear,
            }],
            sigma: 0.0,
        },
    ])
}
