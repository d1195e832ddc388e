// SPDX-License-Identifier: MIT OR Apache-2.0

//! Declarative dataset specs and their regeneration.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corruption::{
    add_noise, inject_anomalies, AnomalyRecord, AnomalySpec, NoiseRecord, NoiseSpec,
};
use crate::error::{Error, Result};
use crate::multivar::{self, catalog_system, CoupledSystem, OdeSpec};
use crate::oracle::OracleClass;
use crate::rng::{Stream, StreamRng};
use crate::series::TimeSeries;
use crate::signal::{
    gen_long_dependency_pattern, gen_periodic, gen_trend, LongDependencyPattern, PeriodicSpec,
    SineComponent, TrendSpec,
};
use crate::stochastic::{gen_arma, gen_composite, gen_random_walk, gen_white_noise, ArmaSpec};

/// Output of any generator before corruption.
#[derive(Clone, Debug)]
pub struct Generated {
    pub series: TimeSeries,
    pub classes: Vec<OracleClass>,
    pub structure: serde_json::Value,
    pub system: Option<CoupledSystem>,
}

impl Generated {
    fn univariate(series: TimeSeries, class: OracleClass) -> Self {
        Self {
            series,
            classes: vec![class],
            structure: serde_json::Value::Null,
            system: None,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompositeComponent {
    pub weight: f64,
    pub generator: GeneratorSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Trend(TrendSpec),
    Periodic(PeriodicSpec),
    LongDependency {
        pattern: LongDependencyPattern,
    },
    WhiteNoise {
        #[serde(default = "one")]
        sigma: f64,
        #[serde(default)]
        mean: f64,
    },
    RandomWalk {
        #[serde(default = "one")]
        sigma: f64,
        #[serde(default)]
        x0: f64,
    },
    Arma(ArmaSpec),
    /// Weighted sum of univariate generators.
    Composite {
        components: Vec<CompositeComponent>,
    },
    LaggedPair {
        lag: usize,
        #[serde(default = "one")]
        sigma: f64,
    },
    SineNoise {
        sine: SineComponent,
        #[serde(default = "one")]
        noise_sigma: f64,
    },
    Coupled {
        system: CoupledSystem,
    },
    /// A coupled system from the bundled catalog.
    System {
        name: String,
    },
    Ode(OdeSpec),
    Recipe {
        name: String,
        #[serde(default, skip_serializing_if = "toml::Table::is_empty")]
        overrides: toml::Table,
    },
}

impl GeneratorSpec {
    fn is_univariate_primitive(&self) -> bool {
        matches!(
            self,
            GeneratorSpec::Trend(_)
                | GeneratorSpec::Periodic(_)
                | GeneratorSpec::LongDependency { .. }
                | GeneratorSpec::WhiteNoise { .. }
                | GeneratorSpec::RandomWalk { .. }
                | GeneratorSpec::Arma(_)
        )
    }

    /// Generates with stochastic draws from `Stream::Generator(stream)`.
    pub fn generate(&self, n: usize, seed: u64, stream: u32) -> Result<Generated> {
        let rng = || StreamRng::for_stream(seed, Stream::Generator(stream));
        match self {
            GeneratorSpec::Trend(spec) => Ok(Generated::univariate(
                gen_trend(spec, n)?,
                OracleClass::Deterministic,
            )),
            GeneratorSpec::Periodic(spec) => Ok(Generated::univariate(
                gen_periodic(spec, n)?,
                OracleClass::Deterministic,
            )),
            GeneratorSpec::LongDependency { pattern } => Ok(Generated::univariate(
                gen_long_dependency_pattern(*pattern, n)?,
                OracleClass::Deterministic,
            )),
            GeneratorSpec::WhiteNoise { sigma, mean } => {
                let ts = gen_white_noise(*sigma, n, &mut rng())?;
                let (names, obs, clean) = ts.into_parts();
                let shift = |v: Vec<Vec<f64>>| {
                    v.into_iter()
                        .map(|c| c.into_iter().map(|x| x + mean).collect())
                        .collect()
                };
                Ok(Generated::univariate(
                    TimeSeries::new(names, shift(obs), shift(clean))?,
                    OracleClass::WhiteNoise { mean: *mean },
                ))
            }
            GeneratorSpec::RandomWalk { sigma, x0 } => Ok(Generated::univariate(
                gen_random_walk(*sigma, n, &mut rng(), *x0)?,
                OracleClass::RandomWalk,
            )),
            GeneratorSpec::Arma(spec) => {
                spec.check_invertible()?;
                Ok(Generated::univariate(
                    gen_arma(spec, n, &mut rng())?,
                    OracleClass::Arma { spec: spec.clone() },
                ))
            }
            GeneratorSpec::Composite { components } => composite(components, n, seed),
            GeneratorSpec::LaggedPair { lag, sigma } => {
                multivar::gen_lagged_pair(*lag, *sigma, n, seed)
            }
            GeneratorSpec::SineNoise { sine, noise_sigma } => {
                multivar::gen_sine_noise(sine, *noise_sigma, n, seed)
            }
            GeneratorSpec::Coupled { system } => multivar::gen_coupled(system, n, seed),
            GeneratorSpec::System { name } => {
                multivar::gen_coupled(&catalog_system(name)?, n, seed)
            }
            GeneratorSpec::Ode(spec) => {
                let series = multivar::integrate_ode(spec, n)?;
                let n_ch = series.n_channels();
                Ok(Generated {
                    series,
                    classes: vec![OracleClass::Deterministic; n_ch],
                    structure: json!({ "ode": spec, "integrator": "rk4" }),
                    system: None,
                })
            }
            GeneratorSpec::Recipe { name, overrides } => {
                multivar::gen_complex_recipe(name, n, seed, overrides)
            }
        }
    }
}

fn composite(components: &[CompositeComponent], n: usize, seed: u64) -> Result<Generated> {
    let mut parts = Vec::with_capacity(components.len());
    for (i, c) in components.iter().enumerate() {
        if !c.generator.is_univariate_primitive() {
            return Err(Error::Config(format!(
                "composite component {i} must be a univariate trend, periodic, noise, walk or ARMA generator"
            )));
        }
        parts.push(c.generator.generate(n, seed, i as u32)?);
    }
    let class = if parts
        .iter()
        .all(|p| p.classes[0] == OracleClass::Deterministic)
    {
        OracleClass::Deterministic
    } else if parts.iter().all(|p| {
        matches!(
            p.classes[0],
            OracleClass::Deterministic | OracleClass::WhiteNoise { .. }
        )
    }) {
        OracleClass::NoisySignal
    } else {
        return Err(Error::Config(
            "composite oracle is only defined for deterministic and white-noise components".into(),
        ));
    };
    let weighted: Vec<(&TimeSeries, f64)> = parts
        .iter()
        .zip(components)
        .map(|(p, c)| (&p.series, c.weight))
        .collect();
    Ok(Generated {
        series: gen_composite(&weighted)?,
        classes: vec![class],
        structure: json!({ "weights": components.iter().map(|c| c.weight).collect::<Vec<_>>() }),
        system: None,
    })
}

/// Everything needed to regenerate a dataset bit for bit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSpec {
    pub id: String,
    pub n: usize,
    pub seed: u64,
    pub generator: GeneratorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub anomalies: Vec<AnomalySpec>,
}

impl DatasetSpec {
    pub fn new(id: impl Into<String>, n: usize, seed: u64, generator: GeneratorSpec) -> Self {
        Self {
            id: id.into(),
            n,
            seed,
            generator,
            noise: None,
            anomalies: Vec::new(),
        }
    }

    pub fn is_corrupted(&self) -> bool {
        self.noise.as_ref().is_some_and(|n| n.snr_db.is_some()) || !self.anomalies.is_empty()
    }

    /// The same spec with anomalies removed; anomaly datasets pair with it.
    pub fn clean_twin(&self) -> DatasetSpec {
        let mut twin = self.clone();
        twin.anomalies.clear();
        twin
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticDataset {
    pub spec: DatasetSpec,
    pub series: TimeSeries,
    pub classes: Vec<OracleClass>,
    pub structure: serde_json::Value,
    pub system: Option<CoupledSystem>,
    pub noise: Option<NoiseRecord>,
    pub anomalies: Vec<AnomalyRecord>,
}

impl SyntheticDataset {
    pub fn id(&self) -> &str {
        &self.spec.id
    }
}

/// Generates the base series, then adds noise, then injects anomalies.
pub fn generate_dataset(spec: &DatasetSpec) -> Result<SyntheticDataset> {
    if spec.n == 0 {
        return Err(Error::Config(format!("dataset `{}` has n = 0", spec.id)));
    }
    let g = spec.generator.generate(spec.n, spec.seed, 0)?;
    let mut classes = g.classes;
    let mut series = g.series;
    let mut noise = None;
    if spec.is_corrupted() {
        let ok = classes.iter().all(|c| {
            matches!(
                c,
                OracleClass::Deterministic
                    | OracleClass::NoisySignal
                    | OracleClass::ComplexPredictable {
                        martingale_residual: false
                    }
            )
        });
        if !ok {
            return Err(Error::Config(format!(
                "dataset `{}`: noise and anomalies apply only to deterministic or clean-signal generators",
                spec.id
            )));
        }
    }
    if let Some(ns) = &spec.noise {
        let (noisy, record) = add_noise(&series, ns, spec.seed)?;
        if record.is_some() {
            for c in &mut classes {
                if *c == OracleClass::Deterministic {
                    *c = OracleClass::NoisySignal;
                }
            }
        }
        series = noisy;
        noise = record;
    }
    let (series, anomalies) = if spec.anomalies.is_empty() {
        (series, Vec::new())
    } else {
        let (s, recs) = inject_anomalies(&series, &spec.anomalies, spec.seed)?;
        for c in &mut classes {
            if *c == OracleClass::Deterministic {
                *c = OracleClass::NoisySignal;
            }
        }
        (s, recs)
    };
    if !series.is_finite() {
        return Err(Error::Domain(format!(
            "dataset `{}` produced non-finite values",
            spec.id
        )));
    }
    Ok(SyntheticDataset {
        spec: spec.clone(),
        series,
        classes,
        structure: g.structure,
        system: g.system,
        noise,
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corruption::{AnomalyKind, NoiseDist};
    use crate::signal::Trend;

    fn sine() -> GeneratorSpec {
        GeneratorSpec::Periodic(PeriodicSpec::Sine {
            amplitude: 1.0,
            frequency: 0.01,
            phase: 0.0,
        })
    }

    #[test]
    fn spec_round_trips_through_toml_and_json() {
        let src = r#"
            id = "lin"
            n = 100
            seed = 4
            [generator]
            kind = "trend"
            trend = "linear"
            a = 1.0
            b = 0.0
        "#;
        let spec: DatasetSpec = toml::from_str(src).unwrap();
        assert_eq!(
            spec.generator,
            GeneratorSpec::Trend(TrendSpec::new(Trend::Linear { a: 1.0, b: 0.0 }))
        );
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<DatasetSpec>(&json).unwrap(), spec);

        let arma: GeneratorSpec =
            toml::from_str("kind = \"arma\"\nphi = [0.5]\ntheta = [0.3]").unwrap();
        assert!(matches!(arma, GeneratorSpec::Arma(ref s) if s.phi == vec![0.5]));
        let wave: GeneratorSpec = toml::from_str(
            "kind = \"periodic\"\nwave = \"square\"\namplitude = 1.0\nfrequency = 0.1",
        )
        .unwrap();
        assert!(matches!(
            wave,
            GeneratorSpec::Periodic(PeriodicSpec::Square { .. })
        ));
        let recipe: GeneratorSpec = toml::from_str(
            "kind = \"recipe\"\nname = \"stock_price\"\noverrides = { rw_scale = 0.0 }",
        )
        .unwrap();
        let back: GeneratorSpec =
            serde_json::from_str(&serde_json::to_string(&recipe).unwrap()).unwrap();
        assert_eq!(back, recipe);
    }

    #[test]
    fn regeneration_is_bit_identical() {
        let mut spec = DatasetSpec::new("s", 2000, 9, sine());
        spec.noise = Some(NoiseSpec::new(NoiseDist::Laplace, 10.0));
        spec.anomalies = vec![AnomalySpec::new(AnomalyKind::Point {
            rate: 0.05,
            sigma_mult: 5.0,
        })];
        let a = generate_dataset(&spec).unwrap();
        let b = generate_dataset(&spec).unwrap();
        assert_eq!(a.series, b.series);
        assert_eq!(a.classes, vec![OracleClass::NoisySignal]);
    }

    #[test]
    fn anomaly_twin_shares_final_fifth() {
        let mut spec = DatasetSpec::new("s", 5000, 9, sine());
        spec.noise = Some(NoiseSpec::new(NoiseDist::Gaussian, 20.0));
        spec.anomalies = vec![AnomalySpec::new(AnomalyKind::Pulse {
            count: 3,
            width: 5,
            magnitude_mult: 3.0,
        })];
        let a = generate_dataset(&spec).unwrap();
        let t = generate_dataset(&spec.clean_twin()).unwrap();
        assert_eq!(a.series.observed(0)[4000..], t.series.observed(0)[4000..]);
        assert_ne!(a.series.observed(0)[..4000], t.series.observed(0)[..4000]);
        assert_eq!(a.series.clean(0), t.series.clean(0));
    }

    #[test]
    fn corrupting_stochastic_generators_is_rejected() {
        let mut spec = DatasetSpec::new(
            "rw",
            500,
            1,
            GeneratorSpec::RandomWalk {
                sigma: 1.0,
                x0: 0.0,
            },
        );
        spec.noise = Some(NoiseSpec::new(NoiseDist::Gaussian, 10.0));
        assert!(matches!(generate_dataset(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn composite_classes() {
        let comp = |g: GeneratorSpec| GeneratorSpec::Composite {
            components: vec![
                CompositeComponent {
                    weight: 1.0,
                    generator: sine(),
                },
                CompositeComponent {
                    weight: 0.5,
                    generator: g,
                },
            ],
        };
        let d = generate_dataset(&DatasetSpec::new(
            "c",
            300,
            1,
            comp(GeneratorSpec::WhiteNoise {
                sigma: 1.0,
                mean: 0.0,
            }),
        ))
        .unwrap();
        assert_eq!(d.classes, vec![OracleClass::NoisySignal]);
        let d = generate_dataset(&DatasetSpec::new("c", 300, 1, comp(sine()))).unwrap();
        assert_eq!(d.classes, vec![OracleClass::Deterministic]);
        assert!(generate_dataset(&DatasetSpec::new(
            "c",
            300,
            1,
            comp(GeneratorSpec::RandomWalk {
                sigma: 1.0,
                x0: 0.0
            })
        ))
        .is_err());
    }

    #[test]
    fn white_noise_mean_shifts_both_channels() {
        let d = generate_dataset(&DatasetSpec::new(
            "w",
            100,
            1,
            GeneratorSpec::WhiteNoise {
                sigma: 1.0,
                mean: 3.0,
            },
        ))
        .unwrap();
        assert!(d.series.clean(0).iter().all(|v| *v == 3.0));
        assert_eq!(d.classes, vec![OracleClass::WhiteNoise { mean: 3.0 }]);
    }
}
