// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded stochastic processes: white noise, random walk, ARMA(p, q) with
//! optional sparse long lags, and weighted composites.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::series::TimeSeries;

pub const DEFAULT_BURN_IN: usize = 1000;

fn default_sigma() -> f64 {
    1.0
}

fn default_burn_in() -> usize {
    DEFAULT_BURN_IN
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtraLag {
    pub lag: usize,
    pub coef: f64,
}

/// x_t = μ + Σ φ_i x_{t−i} + Σ c_ℓ x_{t−ℓ} + Σ θ_j ε_{t−j} + ε_t, ε ~ N(0, σ²).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmaSpec {
    #[serde(default)]
    pub phi: Vec<f64>,
    #[serde(default)]
    pub theta: Vec<f64>,
    /// Intercept.
    #[serde(default)]
    pub mu: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default)]
    pub extra_lags: Vec<ExtraLag>,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

impl ArmaSpec {
    pub fn new(phi: Vec<f64>, theta: Vec<f64>) -> Self {
        Self {
            phi,
            theta,
            mu: 0.0,
            sigma: 1.0,
            extra_lags: Vec::new(),
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn p(&self) -> usize {
        self.phi.len()
    }

    pub fn q(&self) -> usize {
        self.theta.len()
    }

    /// Dense AR coefficients a_1..a_P with the sparse lags folded in.
    pub fn ar_coefficients(&self) -> Vec<f64> {
        let max_extra = self.extra_lags.iter().map(|e| e.lag).max().unwrap_or(0);
        let mut a = vec![0.0; self.p().max(max_extra)];
        a[..self.p()].copy_from_slice(&self.phi);
        for e in &self.extra_lags {
            a[e.lag - 1] += e.coef;
        }
        a
    }

    pub fn max_lag(&self) -> usize {
        self.ar_coefficients().len().max(self.q())
    }

    /// Unconditional mean μ / (1 − Σ a_i).
    pub fn process_mean(&self) -> f64 {
        let s: f64 = self.ar_coefficients().iter().sum();
        self.mu / (1.0 - s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Param(format!(
                "ARMA sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.extra_lags.iter().any(|e| e.lag == 0) {
            return Err(Error::Param("extra lag must be at least 1".into()));
        }
        let needed = 10 * self.max_lag();
        if self.burn_in < needed {
            return Err(Error::Param(format!(
                "burn_in {} is shorter than 10 x max lag ({needed})",
                self.burn_in
            )));
        }
        let modulus = max_companion_root(&self.ar_coefficients());
        if modulus >= 1.0 - 1e-9 {
            return Err(Error::NonStationary { modulus });
        }
        Ok(())
    }

    pub fn check_invertible(&self) -> Result<()> {
        let neg: Vec<f64> = self.theta.iter().map(|t| -t).collect();
        let modulus = max_companion_root(&neg);
        if modulus >= 1.0 - 1e-9 {
            return Err(Error::NonInvertible { modulus });
        }
        Ok(())
    }
}

/// Largest eigenvalue modulus of the companion matrix of 1 − Σ c_i z^i.
/// Values below one mean every root of the polynomial lies outside the unit circle.
pub fn max_companion_root(coefs: &[f64]) -> f64 {
    let k = coefs.len();
    if k == 0 {
        return 0.0;
    }
    let mut m = DMatrix::<f64>::zeros(k, k);
    for (j, c) in coefs.iter().enumerate() {
        m[(0, j)] = *c;
    }
    for i in 1..k {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn normal_draws(sigma: f64, n: usize, rng: &mut StreamRng) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            sigma * z
        })
        .collect()
}

/// i.i.d. N(0, σ²) samples; the clean channel is the process mean, zero.
pub fn gen_white_noise(sigma: f64, n: usize, rng: &mut StreamRng) -> Result<TimeSeries> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Param(format!("sigma must be positive, got {sigma}")));
    }
    let obs = normal_draws(sigma, n, rng);
    TimeSeries::new(vec!["value".into()], vec![obs], vec![vec![0.0; n]])
}

/// x_0 = x0, x_t = x_{t−1} + ε_t. The clean channel equals the path.
pub fn gen_random_walk(sigma: f64, n: usize, rng: &mut StreamRng, x0: f64) -> Result<TimeSeries> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::Param(format!("sigma must be positive, got {sigma}")));
    }
    let eps = normal_draws(sigma, n, rng);
    random_walk_from_increments(x0, &eps)
}

/// Random walk driven by explicit increments; `increments[0]` is unused.
pub fn random_walk_from_increments(x0: f64, increments: &[f64]) -> Result<TimeSeries> {
    let mut path = Vec::with_capacity(increments.len());
    let mut x = x0;
    for (t, e) in increments.iter().enumerate() {
        if t > 0 {
            x += e;
        }
        path.push(x);
    }
    TimeSeries::deterministic("value", path)
}

/// Simulated ARMA path together with the innovations that produced it.
#[derive(Clone, Debug)]
pub struct ArmaPath {
    pub values: Vec<f64>,
    pub innovations: Vec<f64>,
}

/// Runs the ARMA recursion over `burn_in + n` innovations and keeps the last `n`.
pub fn simulate_arma(spec: &ArmaSpec, n: usize, rng: &mut StreamRng) -> Result<ArmaPath> {
    spec.validate()?;
    let total = spec.burn_in + n;
    let eps = normal_draws(spec.sigma, total, rng);
    let values = arma_recursion(spec, &eps);
    Ok(ArmaPath {
        values: values[spec.burn_in..].to_vec(),
        innovations: eps[spec.burn_in..].to_vec(),
    })
}

/// Deterministic ARMA recursion; pre-sample values sit at the process mean.
pub fn arma_recursion(spec: &ArmaSpec, eps: &[f64]) -> Vec<f64> {
    let a = spec.ar_coefficients();
    let mean = spec.process_mean();
    let mut x = Vec::with_capacity(eps.len());
    for t in 0..eps.len() {
        let mut v = spec.mu;
        for (i, ai) in a.iter().enumerate() {
            let lag = i + 1;
            v += ai * if t >= lag { x[t - lag] } else { mean };
        }
        for (j, th) in spec.theta.iter().enumerate() {
            let lag = j + 1;
            if t >= lag {
                v += th * eps[t - lag];
            }
        }
        v += eps[t];
        x.push(v);
    }
    x
}

pub fn gen_arma(spec: &ArmaSpec, n: usize, rng: &mut StreamRng) -> Result<TimeSeries> {
    let path = simulate_arma(spec, n, rng)?;
    TimeSeries::deterministic("value", path.values)
}

/// Weighted sum of equally shaped series, applied to observed and clean alike.
pub fn gen_composite(components: &[(&TimeSeries, f64)]) -> Result<TimeSeries> {
    let (first, _) = components
        .first()
        .ok_or_else(|| Error::Param("composite needs at least one component".into()))?;
    let n = first.n_steps();
    let c = first.n_channels();
    for (ts, _) in components {
        if ts.n_steps() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: ts.n_steps(),
            });
        }
        if ts.n_channels() != c {
            return Err(Error::ShapeMismatch {
                expected: format!("{c} channels"),
                found: format!("{} channels", ts.n_channels()),
            });
        }
    }
    let combine = |pick: fn(&TimeSeries, usize) -> &[f64], ch: usize| -> Vec<f64> {
        let mut it = components.iter();
        let (ts0, w0) = it.next().unwrap();
        let mut acc: Vec<f64> = pick(ts0, ch).iter().map(|v| w0 * v).collect();
        for (ts, w) in it {
            for (a, v) in acc.iter_mut().zip(pick(ts, ch)) {
                *a += w * v;
            }
        }
        acc
    };
    let observed = (0..c).map(|ch| combine(TimeSeries::observed, ch)).collect();
    let clean = (0..c).map(|ch| combine(TimeSeries::clean, ch)).collect();
    TimeSeries::new(first.channel_names().to_vec(), observed, clean)
}
