// SPDX-License-Identifier: MIT OR Apache-2.0

//! Multichannel generators with known cross-variable structure.

pub mod coupled;
pub mod ode;
pub mod recipes;

use serde_json::json;

use crate::dataset::Generated;
use crate::error::{Error, Result};
use crate::oracle::OracleClass;
use crate::rng::{Stream, StreamRng};
use crate::series::TimeSeries;
use crate::signal::SineComponent;
use crate::stochastic::gen_white_noise;

pub use coupled::{lagged_pair_system, ChannelSpec, CoupledSystem, CouplingTerm, Response};
pub use ode::{integrate_ode, lotka_volterra_invariant, OdeSpec, OdeSystem};
pub use recipes::{catalog_system, catalog_version, gen_complex_recipe, RECIPES, SYSTEMS};

/// Runs a coupled system; every channel gets the coupled oracle class.
pub fn gen_coupled(system: &CoupledSystem, n: usize, seed: u64) -> Result<Generated> {
    let series = system.generate(n, seed)?;
    Ok(Generated {
        classes: vec![OracleClass::Coupled; series.n_channels()],
        structure: json!({ "system": system }),
        system: Some(system.clone()),
        series,
    })
}

/// `var1` is white noise; `var2[t] = var1[t − lag]`.
pub fn gen_lagged_pair(lag: usize, sigma: f64, n: usize, seed: u64) -> Result<Generated> {
    if lag == 0 || n <= lag {
        return Err(Error::Param(format!(
            "lagged pair needs 1 <= lag < n, got lag {lag}, n {n}"
        )));
    }
    let mut g = gen_coupled(&lagged_pair_system(lag, sigma), n, seed)?;
    g.structure = json!({
        "edges": [{ "from": "var1", "to": "var2", "lag": lag, "gain": 1.0 }],
        "system": g.system,
    });
    Ok(g)
}

/// Channels: a sine, independent white noise, and their sum.
pub fn gen_sine_noise(
    sine: &SineComponent,
    noise_sigma: f64,
    n: usize,
    seed: u64,
) -> Result<Generated> {
    let wave: Vec<f64> = (0..n).map(|i| sine.value(i as f64)).collect();
    let mut rng = StreamRng::for_stream(seed, Stream::Generator(1));
    let noise = gen_white_noise(noise_sigma, n, &mut rng)?;
    let sum: Vec<f64> = wave
        .iter()
        .zip(noise.observed(0))
        .map(|(a, b)| a + b)
        .collect();
    let series = TimeSeries::new(
        vec!["var1".into(), "var2".into(), "var3".into()],
        vec![wave.clone(), noise.observed(0).to_vec(), sum],
        vec![wave.clone(), vec![0.0; n], wave],
    )?;
    Ok(Generated {
        series,
        classes: vec![
            OracleClass::Deterministic,
            OracleClass::WhiteNoise { mean: 0.0 },
            OracleClass::NoisySignal,
        ],
        structure: json!({ "edges": [
            { "from": "var1", "to": "var3", "gain": 1.0, "lag": 0 },
            { "from": "var2", "to": "var3", "gain": 1.0, "lag": 0 },
        ] }),
        system: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lagged_pair_definition() {
        let g = gen_lagged_pair(5, 1.0, 1000, 1).unwrap();
        let ts = &g.series;
        assert_eq!(ts.observed(1)[100], ts.observed(0)[95]);
        assert!(matches!(
            gen_lagged_pair(10, 1.0, 10, 1),
            Err(Error::Param(_))
        ));
    }

    #[test]
    fn sine_noise_sum_identities() {
        let sine = SineComponent {
            amplitude: 1.0,
            frequency: 0.05,
            phase: 0.0,
        };
        let g = gen_sine_noise(&sine, 0.5, 2000, 3).unwrap();
        let ts = &g.series;
        for i in 0..2000 {
            assert_eq!(ts.observed(2)[i], ts.observed(0)[i] + ts.observed(1)[i]);
            let back = ts.observed(2)[i] - ts.observed(1)[i];
            assert!(
                (back - ts.observed(0)[i]).abs()
                    <= f64::EPSILON * ts.observed(2)[i].abs().max(ts.observed(1)[i].abs())
            );
        }
        assert!(ts.clean(1).iter().all(|v| *v == 0.0));
        assert_eq!(ts.clean(2), ts.observed(0));
    }
}
