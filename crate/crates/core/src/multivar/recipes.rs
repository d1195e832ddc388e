// SPDX-License-Identifier: MIT OR Apache-2.0

//! Composite "real-world" recipes.
//!
//! Each recipe is built from a deterministic profile plus independent,
//! per-step stochastic parts. The clean channel is the profile plus the
//! expectation of the stochastic parts; parameters come from the bundled
//! catalog and may be overridden per dataset.

use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use super::coupled::CoupledSystem;
use super::ode::{integrate_ode, OdeSpec};
use crate::dataset::Generated;
use crate::error::{Error, Result};
use crate::oracle::OracleClass;
use crate::rng::{Stream, StreamRng};
use crate::series::TimeSeries;
use crate::signal::SineComponent;

const CATALOG_SOURCE: &str = include_str!("../../catalog/recipes.toml");

pub const RECIPES: [&str; 15] = [
    "stock_price",
    "temperature_sensor",
    "electricity_consumption",
    "industrial_sensor",
    "network_traffic",
    "retail_sales",
    "economic_indicator",
    "website_traffic",
    "weather_sales",
    "ad_sales",
    "macro_economy",
    "supply_demand_price",
    "intervention_effect",
    "sir_model",
    "lotka_volterra",
];

pub const SYSTEMS: [&str; 3] = ["conditional", "nonlinear", "multivar_complex"];

fn catalog() -> &'static toml::Table {
    static CATALOG: OnceLock<toml::Table> = OnceLock::new();
    CATALOG.get_or_init(|| {
        CATALOG_SOURCE
            .parse()
            .expect("bundled catalog is valid TOML")
    })
}

pub fn catalog_version() -> &'static str {
    catalog()["version"]
        .as_str()
        .expect("catalog version is a string")
}

fn section(kind: &str, name: &str) -> Option<&'static toml::Table> {
    catalog().get(kind)?.as_table()?.get(name)?.as_table()
}

/// Catalog entry with `overrides` merged over it key by key.
pub fn recipe_params(name: &str, overrides: &toml::Table) -> Result<toml::Table> {
    let mut params = section("recipes", name)
        .ok_or_else(|| Error::UnknownRecipe(name.to_string()))?
        .clone();
    for (k, v) in overrides {
        if !params.contains_key(k) {
            return Err(Error::Config(format!(
                "recipe `{name}` has no parameter `{k}`"
            )));
        }
        params.insert(k.clone(), v.clone());
    }
    Ok(params)
}

pub fn catalog_system(name: &str) -> Result<CoupledSystem> {
    let table = section("systems", name).ok_or_else(|| Error::UnknownRecipe(name.to_string()))?;
    parse(name, table.clone())
}

fn parse<T: DeserializeOwned>(name: &str, table: toml::Table) -> Result<T> {
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| Error::Config(format!("recipe `{name}`: {e}")))
}

/// level + slope·t + Σ seasonal sines.
#[derive(Clone, Debug, Deserialize)]
struct Profile {
    level: f64,
    #[serde(default)]
    slope: f64,
    #[serde(default)]
    seasonal: Vec<SineComponent>,
}

impl Profile {
    fn value(&self, t: f64) -> f64 {
        self.seasonal
            .iter()
            .fold(self.level + self.slope * t, |acc, s| acc + s.value(t))
    }

    fn series(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.value(i as f64)).collect()
    }
}

fn sum_sines(components: &[SineComponent], t: f64) -> f64 {
    components.iter().map(|s| s.value(t)).sum()
}

fn normals(seed: u64, component: u32, n: usize) -> Vec<f64> {
    let mut rng = StreamRng::for_stream(seed, Stream::Generator(component));
    (0..n)
        .map(|_| Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect()
}

fn add_scaled(base: &[f64], noise: &[f64], scale: f64) -> Vec<f64> {
    base.iter().zip(noise).map(|(b, e)| b + scale * e).collect()
}

fn univariate(
    name: &str,
    observed: Vec<f64>,
    clean: Vec<f64>,
    class: OracleClass,
    structure: serde_json::Value,
) -> Result<Generated> {
    Ok(Generated {
        series: TimeSeries::new(vec![name.to_string()], vec![observed], vec![clean])?,
        classes: vec![class],
        structure,
        system: None,
    })
}

fn complex() -> OracleClass {
    OracleClass::ComplexPredictable {
        martingale_residual: false,
    }
}

fn multichannel(
    names: &[&str],
    observed: Vec<Vec<f64>>,
    clean: Vec<Vec<f64>>,
    structure: serde_json::Value,
) -> Result<Generated> {
    let n_ch = names.len();
    Ok(Generated {
        series: TimeSeries::new(
            names.iter().map(|s| s.to_string()).collect(),
            observed,
            clean,
        )?,
        classes: vec![complex(); n_ch],
        structure,
        system: None,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Garch {
    omega: f64,
    a: f64,
    b: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StockPrice {
    base: f64,
    growth: f64,
    cycles: Vec<SineComponent>,
    weekly: SineComponent,
    rw_scale: f64,
    garch: Garch,
}

fn stock_price(p: StockPrice, n: usize, seed: u64) -> Result<Generated> {
    let g = &p.garch;
    if !(g.omega > 0.0 && g.a >= 0.0 && g.b >= 0.0 && g.a + g.b < 1.0) {
        return Err(Error::Param(format!(
            "garch needs omega > 0, a, b >= 0 and a + b < 1; got ({}, {}, {})",
            g.omega, g.a, g.b
        )));
    }
    let clean: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64;
            p.base * (p.growth * t).exp() + sum_sines(&p.cycles, t) + p.weekly.value(t)
        })
        .collect();
    let z = normals(seed, 0, n);
    let mut var = g.omega / (1.0 - g.a - g.b);
    let mut prev_r = 0.0;
    let mut walk = 0.0;
    let mut observed = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            var = g.omega + g.a * prev_r * prev_r + g.b * var;
            let r = var.sqrt() * z[i];
            walk += p.rw_scale * r;
            prev_r = r;
        }
        observed.push(clean[i] + walk);
    }
    univariate(
        "price",
        observed,
        clean,
        OracleClass::ComplexPredictable {
            martingale_residual: true,
        },
        json!({
            "components": ["exponential_trend", "cycles", "weekly", "garch_random_walk"],
            "clean": "exponential_trend + cycles + weekly",
            "residual": "random walk with GARCH(1,1) increments",
        }),
    )
}

#[derive(Deserialize)]
struct ProfileNoise {
    #[serde(flatten)]
    profile: Profile,
    noise_sigma: f64,
}

fn temperature_sensor(p: ProfileNoise, n: usize, seed: u64) -> Result<Generated> {
    let clean = p.profile.series(n);
    let observed = add_scaled(&clean, &normals(seed, 0, n), p.noise_sigma);
    univariate(
        "temperature",
        observed,
        clean,
        complex(),
        json!({ "components": ["trend", "annual", "daily", "gaussian_noise"], "clean": "trend + annual + daily" }),
    )
}

#[derive(Deserialize)]
struct Electricity {
    #[serde(flatten)]
    profile: Profile,
    noise_sigma: f64,
    hetero: f64,
}

fn electricity_consumption(p: Electricity, n: usize, seed: u64) -> Result<Generated> {
    let clean = p.profile.series(n);
    let z = normals(seed, 0, n);
    let observed = clean
        .iter()
        .zip(&z)
        .map(|(c, e)| {
            let scale = 1.0 + p.hetero * (c / p.profile.level - 1.0);
            c + p.noise_sigma * scale.max(0.0) * e
        })
        .collect();
    univariate(
        "load",
        observed,
        clean,
        complex(),
        json!({ "components": ["trend", "daily", "weekly", "heteroscedastic_noise"], "clean": "trend + daily + weekly" }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Industrial {
    level: f64,
    wear_rate: f64,
    maintenance_period: usize,
    vibration: SineComponent,
    noise_sigma: f64,
    spike_prob: f64,
    spike_size: f64,
}

fn industrial_sensor(p: Industrial, n: usize, seed: u64) -> Result<Generated> {
    if p.maintenance_period == 0 || !(0.0..=1.0).contains(&p.spike_prob) {
        return Err(Error::Param(
            "industrial_sensor needs maintenance_period >= 1 and spike_prob in [0, 1]".into(),
        ));
    }
    let profile: Vec<f64> = (0..n)
        .map(|i| {
            p.level + p.wear_rate * (i % p.maintenance_period) as f64 + p.vibration.value(i as f64)
        })
        .collect();
    let mut spikes = StreamRng::for_stream(seed, Stream::Generator(1));
    let z = normals(seed, 0, n);
    let observed = (0..n)
        .map(|i| {
            let spike = if spikes.random::<f64>() < p.spike_prob {
                p.spike_size
            } else {
                0.0
            };
            profile[i] + spike + p.noise_sigma * z[i]
        })
        .collect();
    let clean = profile
        .iter()
        .map(|v| v + p.spike_prob * p.spike_size)
        .collect();
    univariate(
        "sensor",
        observed,
        clean,
        complex(),
        json!({
            "components": ["degradation_with_maintenance_resets", "vibration", "bernoulli_spikes", "gaussian_noise"],
            "clean": "degradation + vibration + spike_prob * spike_size",
        }),
    )
}

#[derive(Deserialize)]
struct Network {
    #[serde(flatten)]
    profile: Profile,
    noise_sigma: f64,
    burst_prob: f64,
    burst_mean: f64,
}

fn network_traffic(p: Network, n: usize, seed: u64) -> Result<Generated> {
    if !(0.0..=1.0).contains(&p.burst_prob) {
        return Err(Error::Param("burst_prob must lie in [0, 1]".into()));
    }
    let profile = p.profile.series(n);
    let z = normals(seed, 0, n);
    let mut bursts = StreamRng::for_stream(seed, Stream::Generator(1));
    let observed = (0..n)
        .map(|i| {
            let hit = bursts.random::<f64>() < p.burst_prob;
            let size: f64 = Exp1.sample(&mut bursts);
            let burst = if hit { p.burst_mean * size } else { 0.0 };
            profile[i] + burst + p.noise_sigma * z[i]
        })
        .collect();
    let clean = profile
        .iter()
        .map(|v| v + p.burst_prob * p.burst_mean)
        .collect();
    univariate(
        "traffic",
        observed,
        clean,
        complex(),
        json!({
            "components": ["daily", "weekly", "exponential_bursts", "gaussian_noise"],
            "clean": "profile + burst_prob * burst_mean",
        }),
    )
}

#[derive(Deserialize)]
struct Retail {
    #[serde(flatten)]
    profile: Profile,
    noise_sigma: f64,
    promo_every: usize,
    promo_len: usize,
    promo_lift: f64,
}

fn retail_sales(p: Retail, n: usize, seed: u64) -> Result<Generated> {
    if p.promo_every == 0 {
        return Err(Error::Param("promo_every must be at least 1".into()));
    }
    let clean: Vec<f64> = (0..n)
        .map(|i| {
            let promo = if i % p.promo_every < p.promo_len {
                p.promo_lift
            } else {
                0.0
            };
            p.profile.value(i as f64) + promo
        })
        .collect();
    let observed = add_scaled(&clean, &normals(seed, 0, n), p.noise_sigma);
    univariate(
        "sales",
        observed,
        clean,
        complex(),
        json!({ "components": ["trend", "weekly", "yearly", "promotions", "gaussian_noise"], "clean": "trend + weekly + yearly + promotions" }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Economic {
    base: f64,
    growth: f64,
    cycles: Vec<SineComponent>,
    noise_sigma: f64,
}

fn economic_indicator(p: Economic, n: usize, seed: u64) -> Result<Generated> {
    let clean: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64;
            p.base * (p.growth * t).exp() + sum_sines(&p.cycles, t)
        })
        .collect();
    let observed = add_scaled(&clean, &normals(seed, 0, n), p.noise_sigma);
    univariate(
        "indicator",
        observed,
        clean,
        complex(),
        json!({ "components": ["exponential_growth", "business_cycles", "gaussian_noise"], "clean": "growth + cycles" }),
    )
}

#[derive(Deserialize)]
struct Website {
    #[serde(flatten)]
    profile: Profile,
    log_sigma: f64,
}

fn website_traffic(p: Website, n: usize, seed: u64) -> Result<Generated> {
    let clean = p.profile.series(n);
    let z = normals(seed, 0, n);
    let s = p.log_sigma;
    // Mean-one log-normal factor.
    let observed = clean
        .iter()
        .zip(&z)
        .map(|(c, e)| c * (s * e - s * s / 2.0).exp())
        .collect();
    univariate(
        "visits",
        observed,
        clean,
        complex(),
        json!({ "components": ["trend", "weekly", "daily", "lognormal_factor"], "clean": "trend + weekly + daily" }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SalesResponse {
    base: f64,
    temperature: f64,
    rain: f64,
    sigma: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WeatherSales {
    temperature: Profile,
    temperature_sigma: f64,
    rain_level: f64,
    rain_mu: f64,
    rain_season: SineComponent,
    rain_sigma: f64,
    ice_cream: SalesResponse,
    umbrella: SalesResponse,
    beverage: SalesResponse,
}

fn weather_sales(p: WeatherSales, n: usize, seed: u64) -> Result<Generated> {
    let temp_clean = p.temperature.series(n);
    let temp = add_scaled(&temp_clean, &normals(seed, 0, n), p.temperature_sigma);
    let rz = normals(seed, 1, n);
    let s2 = p.rain_sigma * p.rain_sigma;
    let mut rain = Vec::with_capacity(n);
    let mut rain_clean = Vec::with_capacity(n);
    for i in 0..n {
        let mu = p.rain_mu + p.rain_season.value(i as f64);
        rain.push(p.rain_level * (mu + p.rain_sigma * rz[i]).exp());
        rain_clean.push(p.rain_level * (mu + s2 / 2.0).exp());
    }
    let mut observed = vec![temp.clone(), rain.clone()];
    let mut clean = vec![temp_clean.clone(), rain_clean.clone()];
    for (k, r) in [&p.ice_cream, &p.umbrella, &p.beverage]
        .into_iter()
        .enumerate()
    {
        let z = normals(seed, 2 + k as u32, n);
        observed.push(
            (0..n)
                .map(|i| r.base + r.temperature * temp[i] + r.rain * rain[i] + r.sigma * z[i])
                .collect(),
        );
        clean.push(
            (0..n)
                .map(|i| r.base + r.temperature * temp_clean[i] + r.rain * rain_clean[i])
                .collect(),
        );
    }
    multichannel(
        &[
            "temperature",
            "rainfall",
            "ice_cream",
            "umbrella",
            "beverage",
        ],
        observed,
        clean,
        json!({
            "edges": [
                { "from": "temperature", "to": "ice_cream", "gain": p.ice_cream.temperature },
                { "from": "rainfall", "to": "ice_cream", "gain": p.ice_cream.rain },
                { "from": "temperature", "to": "umbrella", "gain": p.umbrella.temperature },
                { "from": "rainfall", "to": "umbrella", "gain": p.umbrella.rain },
                { "from": "temperature", "to": "beverage", "gain": p.beverage.temperature },
                { "from": "rainfall", "to": "beverage", "gain": p.beverage.rain },
            ],
            "rainfall": "rain_level * lognormal(rain_mu + seasonal, rain_sigma)",
            "clean": "profiles plus responses to the expected drivers",
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AdSales {
    base_spend: f64,
    campaign_spend: f64,
    campaign_every: usize,
    campaign_len: usize,
    spend_sigma: f64,
    adstock_decay: f64,
    sales_base: f64,
    sales_gain: f64,
    seasonal: Vec<SineComponent>,
    sales_sigma: f64,
}

fn ad_sales(p: AdSales, n: usize, seed: u64) -> Result<Generated> {
    if p.campaign_every == 0 || !(0.0..1.0).contains(&p.adstock_decay) {
        return Err(Error::Param(
            "ad_sales needs campaign_every >= 1 and adstock_decay in [0, 1)".into(),
        ));
    }
    let planned: Vec<f64> = (0..n)
        .map(|i| {
            p.base_spend
                + if i % p.campaign_every < p.campaign_len {
                    p.campaign_spend
                } else {
                    0.0
                }
        })
        .collect();
    let mut adstock = Vec::with_capacity(n);
    let mut a = p.base_spend / (1.0 - p.adstock_decay);
    for x in &planned {
        a = x + p.adstock_decay * a;
        adstock.push(a);
    }
    let sales_clean: Vec<f64> = (0..n)
        .map(|i| p.sales_base + sum_sines(&p.seasonal, i as f64) + p.sales_gain * adstock[i])
        .collect();
    let spend = add_scaled(&planned, &normals(seed, 0, n), p.spend_sigma);
    let sales = add_scaled(&sales_clean, &normals(seed, 1, n), p.sales_sigma);
    multichannel(
        &["ad_spend", "sales"],
        vec![spend, sales],
        vec![planned, sales_clean],
        json!({
            "edges": [{ "from": "ad_spend", "to": "sales", "gain": p.sales_gain, "via": "geometric adstock of planned spend", "decay": p.adstock_decay }],
            "clean": "planned spend; sales base + seasonal + gain * adstock",
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Macro {
    gdp_base: f64,
    gdp_growth: f64,
    cycles: Vec<SineComponent>,
    gdp_cycle: f64,
    inflation_base: f64,
    inflation_cycle: f64,
    inflation_lag: usize,
    unemployment_base: f64,
    okun: f64,
    rate_neutral: f64,
    rate_inflation: f64,
    rate_gap: f64,
    inflation_target: f64,
    sigmas: [f64; 4],
}

fn macro_economy(p: Macro, n: usize, seed: u64) -> Result<Generated> {
    let cycle = |t: f64| sum_sines(&p.cycles, t);
    let mut clean: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(n)).collect();
    for i in 0..n {
        let t = i as f64;
        let c = cycle(t);
        let inflation = p.inflation_base + p.inflation_cycle * cycle(t - p.inflation_lag as f64);
        clean[0].push(p.gdp_base * (p.gdp_growth * t).exp() + p.gdp_cycle * c);
        clean[1].push(inflation);
        clean[2].push(p.unemployment_base - p.okun * c);
        clean[3].push(
            p.rate_neutral + p.rate_inflation * (inflation - p.inflation_target) + p.rate_gap * c,
        );
    }
    let observed = (0..4)
        .map(|k| add_scaled(&clean[k], &normals(seed, k as u32, n), p.sigmas[k]))
        .collect();
    multichannel(
        &["gdp", "inflation", "unemployment", "interest_rate"],
        observed,
        clean,
        json!({
            "edges": [
                { "from": "business_cycle", "to": "gdp", "gain": p.gdp_cycle },
                { "from": "business_cycle", "to": "inflation", "gain": p.inflation_cycle, "lag": p.inflation_lag },
                { "from": "business_cycle", "to": "unemployment", "gain": -p.okun },
                { "from": "inflation", "to": "interest_rate", "gain": p.rate_inflation },
                { "from": "business_cycle", "to": "interest_rate", "gain": p.rate_gap },
            ],
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SupplyDemand {
    demand: Profile,
    supply: Profile,
    price_base: f64,
    price_gain: f64,
    sigmas: [f64; 3],
}

fn supply_demand_price(p: SupplyDemand, n: usize, seed: u64) -> Result<Generated> {
    let demand = p.demand.series(n);
    let supply = p.supply.series(n);
    let price: Vec<f64> = demand
        .iter()
        .zip(&supply)
        .map(|(d, s)| p.price_base + p.price_gain * (d - s))
        .collect();
    let clean = vec![demand, supply, price];
    let observed = (0..3)
        .map(|k| add_scaled(&clean[k], &normals(seed, k as u32, n), p.sigmas[k]))
        .collect();
    multichannel(
        &["demand", "supply", "price"],
        observed,
        clean,
        json!({
            "edges": [
                { "from": "demand", "to": "price", "gain": p.price_gain },
                { "from": "supply", "to": "price", "gain": -p.price_gain },
            ],
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Intervention {
    control: Profile,
    treated_offset: f64,
    effect: f64,
    at_fraction: f64,
    noise_sigma: f64,
}

fn intervention_effect(p: Intervention, n: usize, seed: u64) -> Result<Generated> {
    let at = (p.at_fraction * n as f64).round() as usize;
    let indicator: Vec<f64> = (0..n).map(|i| if i >= at { 1.0 } else { 0.0 }).collect();
    let control = p.control.series(n);
    let treated: Vec<f64> = (0..n)
        .map(|i| control[i] + p.treated_offset + p.effect * indicator[i])
        .collect();
    let observed = vec![
        indicator.clone(),
        add_scaled(&control, &normals(seed, 0, n), p.noise_sigma),
        add_scaled(&treated, &normals(seed, 1, n), p.noise_sigma),
    ];
    let mut g = multichannel(
        &["intervention", "control", "treated"],
        observed,
        vec![indicator, control, treated],
        json!({
            "edges": [{ "from": "intervention", "to": "treated", "gain": p.effect }],
            "onset": at,
        }),
    )?;
    g.classes[0] = OracleClass::Deterministic;
    Ok(g)
}

fn ode_recipe(name: &str, params: toml::Table, n: usize) -> Result<Generated> {
    let spec: OdeSpec = parse(name, params)?;
    let series = integrate_ode(&spec, n)?;
    let n_ch = series.n_channels();
    Ok(Generated {
        series,
        classes: vec![OracleClass::Deterministic; n_ch],
        structure: json!({ "ode": spec, "integrator": "rk4" }),
        system: None,
    })
}

/// Generates the named recipe with catalog parameters, optionally overridden.
pub fn gen_complex_recipe(
    name: &str,
    n: usize,
    seed: u64,
    overrides: &toml::Table,
) -> Result<Generated> {
    let params = recipe_params(name, overrides)?;
    let mut g = match name {
        "stock_price" => stock_price(parse(name, params.clone())?, n, seed),
        "temperature_sensor" => temperature_sensor(parse(name, params.clone())?, n, seed),
        "electricity_consumption" => electricity_consumption(parse(name, params.clone())?, n, seed),
        "industrial_sensor" => industrial_sensor(parse(name, params.clone())?, n, seed),
        "network_traffic" => network_traffic(parse(name, params.clone())?, n, seed),
        "retail_sales" => retail_sales(parse(name, params.clone())?, n, seed),
        "economic_indicator" => economic_indicator(parse(name, params.clone())?, n, seed),
        "website_traffic" => website_traffic(parse(name, params.clone())?, n, seed),
        "weather_sales" => weather_sales(parse(name, params.clone())?, n, seed),
        "ad_sales" => ad_sales(parse(name, params.clone())?, n, seed),
        "macro_economy" => macro_economy(parse(name, params.clone())?, n, seed),
        "supply_demand_price" => supply_demand_price(parse(name, params.clone())?, n, seed),
        "intervention_effect" => intervention_effect(parse(name, params.clone())?, n, seed),
        "sir_model" | "lotka_volterra" => ode_recipe(name, params.clone(), n),
        _ => Err(Error::UnknownRecipe(name.to_string())),
    }?;
    if let serde_json::Value::Object(map) = &mut g.structure {
        map.insert("recipe".into(), json!(name));
        map.insert(
            "parameters".into(),
            serde_json::to_value(&params).map_err(|e| Error::Config(e.to_string()))?,
        );
    }
    Ok(g)
}
