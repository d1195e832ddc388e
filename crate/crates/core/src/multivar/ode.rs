// SPDX-License-Identifier: MIT OR Apache-2.0

//! Fixed-step RK4 integration of Lotka-Volterra and SIR systems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum OdeSystem {
    /// dx = αx − βxy, dy = δxy − γy.
    LotkaVolterra {
        alpha: f64,
        beta: f64,
        gamma: f64,
        delta: f64,
        x0: f64,
        y0: f64,
    },
    /// dS = −βSI/N, dI = βSI/N − γI, dR = γI.
    Sir {
        beta: f64,
        gamma: f64,
        population: f64,
        s0: f64,
        i0: f64,
    },
}

fn default_substeps() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeSpec {
    #[serde(flatten)]
    pub system: OdeSystem,
    pub dt: f64,
    /// RK4 steps per emitted sample.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

impl OdeSystem {
    pub fn channel_names(&self) -> Vec<String> {
        match self {
            OdeSystem::LotkaVolterra { .. } => vec!["prey".into(), "predator".into()],
            OdeSystem::Sir { .. } => {
                vec!["susceptible".into(), "infected".into(), "recovered".into()]
            }
        }
    }

    pub fn initial_state(&self) -> Vec<f64> {
        match *self {
            OdeSystem::LotkaVolterra { x0, y0, .. } => vec![x0, y0],
            OdeSystem::Sir {
                population, s0, i0, ..
            } => vec![s0, i0, population - s0 - i0],
        }
    }

    fn derivative(&self, s: &[f64], out: &mut [f64]) {
        match *self {
            OdeSystem::LotkaVolterra {
                alpha,
                beta,
                gamma,
                delta,
                ..
            } => {
                out[0] = alpha * s[0] - beta * s[0] * s[1];
                out[1] = delta * s[0] * s[1] - gamma * s[1];
            }
            OdeSystem::Sir {
                beta,
                gamma,
                population,
                ..
            } => {
                let infection = beta * s[0] * s[1] / population;
                let recovery = gamma * s[1];
                out[0] = -infection;
                out[1] = infection - recovery;
                out[2] = recovery;
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            OdeSystem::LotkaVolterra {
                alpha,
                beta,
                gamma,
                delta,
                x0,
                y0,
            } => [alpha, beta, gamma, delta, x0, y0]
                .iter()
                .all(|v| *v > 0.0 && v.is_finite()),
            OdeSystem::Sir {
                beta,
                gamma,
                population,
                s0,
                i0,
            } => {
                [beta, gamma, population]
                    .iter()
                    .all(|v| *v > 0.0 && v.is_finite())
                    && s0 >= 0.0
                    && i0 >= 0.0
                    && s0 + i0 <= population
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Param(format!("invalid ODE parameters: {self:?}")))
        }
    }
}

/// V = δx − γ ln x + βy − α ln y, constant along Lotka-Volterra trajectories.
pub fn lotka_volterra_invariant(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    x: f64,
    y: f64,
) -> f64 {
    delta * x - gamma * x.ln() + beta * y - alpha * y.ln()
}

fn rk4_step(sys: &OdeSystem, state: &mut [f64], dt: f64) {
    let d = state.len();
    let mut k1 = vec![0.0; d];
    let mut k2 = vec![0.0; d];
    let mut k3 = vec![0.0; d];
    let mut k4 = vec![0.0; d];
    let mut tmp = vec![0.0; d];
    sys.derivative(state, &mut k1);
    for i in 0..d {
        tmp[i] = state[i] + 0.5 * dt * k1[i];
    }
    sys.derivative(&tmp, &mut k2);
    for i in 0..d {
        tmp[i] = state[i] + 0.5 * dt * k2[i];
    }
    sys.derivative(&tmp, &mut k3);
    for i in 0..d {
        tmp[i] = state[i] + dt * k3[i];
    }
    sys.derivative(&tmp, &mut k4);
    for i in 0..d {
        state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Emits `n` samples, the first being the initial state.
pub fn integrate_ode(spec: &OdeSpec, n: usize) -> Result<TimeSeries> {
    spec.system.validate()?;
    if !(spec.dt > 0.0 && spec.dt.is_finite()) || spec.substeps == 0 {
        return Err(Error::Param(format!(
            "ODE needs dt > 0 and substeps >= 1, got dt {} substeps {}",
            spec.dt, spec.substeps
        )));
    }
    let mut state = spec.system.initial_state();
    let mut channels = vec![Vec::with_capacity(n); state.len()];
    for step in 0..n {
        if step > 0 {
            for _ in 0..spec.substeps {
                rk4_step(&spec.system, &mut state, spec.dt);
            }
        }
        if state.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::StepTooLarge {
                step,
                state: format!("{state:?}"),
            });
        }
        for (c, v) in channels.iter_mut().zip(&state) {
            c.push(*v);
        }
    }
    TimeSeries::new(spec.system.channel_names(), channels.clone(), channels)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(x0: f64, y0: f64, dt: f64) -> OdeSpec {
        OdeSpec {
            system: OdeSystem::LotkaVolterra {
                alpha: 1.0,
                beta: 1.0,
                gamma: 1.0,
                delta: 1.0,
                x0,
                y0,
            },
            dt,
            substeps: 1,
        }
    }

    #[test]
    fn lv_fixed_point_is_constant() {
        let ts = integrate_ode(&lv(1.0, 1.0, 0.01), 5000).unwrap();
        assert!(ts.observed(0).iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(ts.observed(1).iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn lv_invariant_converges_at_fourth_order() {
        let drift = |dt: f64, n: usize| {
            let ts = integrate_ode(&lv(2.0, 0.5, dt), n).unwrap();
            let v0 = lotka_volterra_invariant(1.0, 1.0, 1.0, 1.0, 2.0, 0.5);
            let x = ts.observed(0)[n - 1];
            let y = ts.observed(1)[n - 1];
            ((lotka_volterra_invariant(1.0, 1.0, 1.0, 1.0, x, y) - v0) / v0).abs()
        };
        let coarse = drift(0.01, 5000);
        let fine = drift(0.005, 9999);
        assert!(coarse < 1e-4, "{coarse}");
        assert!(coarse / fine >= 8.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn sir_conserves_population() {
        let spec = OdeSpec {
            system: OdeSystem::Sir {
                beta: 0.3,
                gamma: 0.1,
                population: 1000.0,
                s0: 990.0,
                i0: 10.0,
            },
            dt: 0.1,
            substeps: 10,
        };
        let ts = integrate_ode(&spec, 2000).unwrap();
        for t in 0..2000 {
            let total = ts.observed(0)[t] + ts.observed(1)[t] + ts.observed(2)[t];
            assert!((total - 1000.0).abs() < 1e-9);
        }
    }

    #[test]
    fn huge_step_is_rejected() {
        assert!(matches!(
            integrate_ode(&lv(2.0, 0.5, 5.0), 50),
            Err(Error::StepTooLarge { .. })
        ));
    }
}
