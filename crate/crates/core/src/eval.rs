// SPDX-License-Identifier: MIT OR Apache-2.0

//! Sliding-window evaluation over the final evaluation partition.

use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineSpec, FittedBaseline};
use crate::dataset::SyntheticDataset;
use crate::error::{Error, Result};
use crate::metrics::{aggregate, Accumulator, HorizonMetrics, MetricRow};
use crate::oracle::PreparedOracle;
use crate::series::{
    make_windows, partition_bounds, split_baseline, EvalProtocol, Normalizer, TimeSeries, Window,
};

/// Windows per reduction chunk. Fixed so results do not depend on thread count.
pub const CHUNK: usize = 64;

pub const ORACLE_ID: &str = "oracle";

/// Anything that produces `[channel][step]` forecasts in raw units from the
/// observed history before `origin`.
pub trait Forecaster: Sync {
    fn forecast(&self, origin: usize, horizon: usize) -> Result<Vec<Vec<f64>>>;
}

impl Forecaster for PreparedOracle<'_> {
    fn forecast(&self, origin: usize, horizon: usize) -> Result<Vec<Vec<f64>>> {
        PreparedOracle::forecast(self, origin, horizon)
    }
}

impl Forecaster for FittedBaseline<'_> {
    fn forecast(&self, origin: usize, horizon: usize) -> Result<Vec<Vec<f64>>> {
        FittedBaseline::forecast(self, origin, horizon)
    }
}

impl<F> Forecaster for F
where
    F: Fn(usize, usize) -> Result<Vec<Vec<f64>>> + Sync,
{
    fn forecast(&self, origin: usize, horizon: usize) -> Result<Vec<Vec<f64>>> {
        self(origin, horizon)
    }
}

/// Ranges and scaling shared by every model evaluated on one series.
#[derive(Clone, Debug)]
pub struct EvalContext<'a> {
    ts: &'a TimeSeries,
    protocol: EvalProtocol,
    fit_range: Range<usize>,
    eval_range: Range<usize>,
    normalizer: Normalizer,
}

impl<'a> EvalContext<'a> {
    pub fn new(ts: &'a TimeSeries, protocol: &EvalProtocol) -> Result<Self> {
        protocol.validate()?;
        let (fit_range, eval_range) = split_baseline(ts.n_steps(), protocol)?;
        let normalizer = if protocol.scores_normalized() {
            let train = partition_bounds(ts.n_steps(), &protocol.split)[0].clone();
            Normalizer::fit(ts, train)?
        } else {
            Normalizer::identity(ts.n_channels())
        };
        Ok(Self {
            ts,
            protocol: protocol.clone(),
            fit_range,
            eval_range,
            normalizer,
        })
    }

    pub fn series(&self) -> &'a TimeSeries {
        self.ts
    }

    pub fn protocol(&self) -> &EvalProtocol {
        &self.protocol
    }

    pub fn fit_range(&self) -> Range<usize> {
        self.fit_range.clone()
    }

    pub fn eval_range(&self) -> Range<usize> {
        self.eval_range.clone()
    }

    pub fn normalizer(&self) -> &Normalizer {
        &self.normalizer
    }

    pub fn windows(&self, horizon: usize) -> Result<Vec<Window<'a>>> {
        make_windows(
            self.ts,
            self.eval_range(),
            self.protocol.input_len,
            horizon,
            self.protocol.stride,
        )
    }

    /// Scores one forecaster at one horizon.
    pub fn evaluate_horizon(
        &self,
        model: &dyn Forecaster,
        horizon: usize,
    ) -> Result<HorizonMetrics> {
        let windows = self.windows(horizon)?;
        let channels = self.ts.n_channels();
        let partials: Vec<Accumulator> = windows
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = Accumulator::new(channels, horizon, true);
                for w in chunk {
                    let raw = model.forecast(w.origin(), horizon)?;
                    if raw.len() != channels {
                        return Err(Error::ShapeMismatch {
                            expected: format!("{channels} channels"),
                            found: format!("{} channels", raw.len()),
                        });
                    }
                    let scale = |c: usize, v: &[f64]| self.normalizer.apply_slice(c, v);
                    let pred: Vec<Vec<f64>> =
                        raw.iter().enumerate().map(|(c, v)| scale(c, v)).collect();
                    let obs: Vec<Vec<f64>> = (0..channels)
                        .map(|c| scale(c, w.target_observed(c)))
                        .collect();
                    let clean: Vec<Vec<f64>> =
                        (0..channels).map(|c| scale(c, w.target_clean(c))).collect();
                    acc.push_window(&pred, &obs, Some(&clean))?;
                }
                Ok(acc)
            })
            .collect::<Result<_>>()?;
        let mut total = Accumulator::new(channels, horizon, true);
        for p in &partials {
            total.merge(p);
        }
        Ok(total.finish())
    }

    pub fn evaluate(&self, model_id: &str, model: &dyn Forecaster) -> Result<ModelEval> {
        let horizons = self
            .protocol
            .horizons
            .iter()
            .map(|h| self.evaluate_horizon(model, *h))
            .collect::<Result<Vec<_>>>()?;
        ModelEval::new(model_id, horizons, &self.protocol.horizons)
    }
}

/// Every horizon of one model on one dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelEval {
    pub model: String,
    pub horizons: Vec<HorizonMetrics>,
    pub aggregate: MetricRow,
}

impl ModelEval {
    pub fn new(model: &str, horizons: Vec<HorizonMetrics>, order: &[usize]) -> Result<Self> {
        let rows: BTreeMap<usize, MetricRow> = horizons
            .iter()
            .map(|h| (h.horizon, h.row.clone()))
            .collect();
        Ok(Self {
            model: model.to_string(),
            aggregate: aggregate(&rows, order)?,
            horizons,
        })
    }

    pub fn at(&self, horizon: usize) -> Option<&HorizonMetrics> {
        self.horizons.iter().find(|h| h.horizon == horizon)
    }
}

/// A baseline that could not be fitted on a dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedBaseline {
    pub model: String,
    pub reason: String,
}

/// Oracle plus every baseline that fits. Baselines failing with
/// `SingularAutocovariance` or `InsufficientHistory` are skipped.
pub fn evaluate_builtin(
    ds: &SyntheticDataset,
    protocol: &EvalProtocol,
    baselines: &[BaselineSpec],
) -> Result<(Vec<ModelEval>, Vec<SkippedBaseline>)> {
    let ctx = EvalContext::new(&ds.series, protocol)?;
    let oracle = PreparedOracle::new(&ds.series, &ds.classes, ds.system.as_ref())?;
    let mut evals = vec![ctx.evaluate(ORACLE_ID, &oracle)?];
    let mut skipped = Vec::new();
    for spec in baselines {
        let fitted = FittedBaseline::fit(spec, &ds.series, ctx.fit_range())
            .and_then(|b| ctx.evaluate(&spec.name(), &b));
        match fitted {
            Ok(e) => evals.push(e),
            Err(e @ (Error::SingularAutocovariance | Error::InsufficientHistory { .. })) => skipped
                .push(SkippedBaseline {
                    model: spec.name(),
                    reason: e.to_string(),
                }),
            Err(e) => return Err(e),
        }
    }
    Ok((evals, skipped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{generate_dataset, DatasetSpec, GeneratorSpec};

    fn protocol(h: usize, normalize: bool) -> EvalProtocol {
        EvalProtocol {
            horizons: vec![h],
            normalize,
            ..EvalProtocol::default()
        }
    }

    #[test]
    fn white_noise_oracle_near_unit_mse() {
        let spec = DatasetSpec::new(
            "wn",
            5000,
            11,
            GeneratorSpec::WhiteNoise {
                sigma: 1.0,
                mean: 0.0,
            },
        );
        let ds = generate_dataset(&spec).unwrap();
        let (evals, skipped) = evaluate_builtin(
            &ds,
            &protocol(10, false),
            &[BaselineSpec::Naive, BaselineSpec::Mean],
        )
        .unwrap();
        assert!(skipped.is_empty());
        let oracle = &evals[0].horizons[0];
        assert_eq!(oracle.window_count, 1000 - 96 - 10 + 1);
        assert!((oracle.row.mse_obs - 1.0).abs() < 0.1);
        let naive = &evals[1].horizons[0].row;
        assert!(naive.mse_obs > 1.5);
    }

    #[test]
    fn identical_across_thread_counts() {
        let spec = DatasetSpec::new(
            "rw",
            3000,
            5,
            GeneratorSpec::RandomWalk {
                sigma: 1.0,
                x0: 0.0,
            },
        );
        let ds = generate_dataset(&spec).unwrap();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    evaluate_builtin(&ds, &protocol(24, true), &[BaselineSpec::Drift]).unwrap()
                })
        };
        assert_eq!(run(1), run(7));
    }

    #[test]
    fn constant_series_skips_ar() {
        let spec = DatasetSpec::new(
            "flat",
            1000,
            0,
            GeneratorSpec::Trend(crate::signal::TrendSpec::new(
                crate::signal::Trend::Linear { a: 0.0, b: 2.0 },
            )),
        );
        let ds = generate_dataset(&spec).unwrap();
        let (evals, skipped) = evaluate_builtin(
            &ds,
            &protocol(24, true),
            &[BaselineSpec::ArFit {
                p: 2,
                fit_window: None,
            }],
        )
        .unwrap();
        assert_eq!(evals.len(), 1);
        assert_eq!(skipped[0].model, "ar_fit_2");
        assert_eq!(evals[0].aggregate.mse_obs, 0.0);
    }
}
