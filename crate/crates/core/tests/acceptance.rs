// SPDX-License-Identifier: MIT OR Apache-2.0

//! Acceptance gate. Every criterion prints one `PASS`/`FAIL` line; the test
//! fails if any criterion fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use tsbench::baselines::BaselineSpec;
use tsbench::corruption::{add_noise, sample_levy_stable, AnomalyKind, NoiseDist, NoiseSpec};
use tsbench::eval::{evaluate_builtin, EvalContext, ModelEval};
use tsbench::metrics::{compute_metrics, degradation, difficulty_scores, HorizonMetrics};
use tsbench::multivar::{integrate_ode, lotka_volterra_invariant, OdeSpec, OdeSystem};
use tsbench::oracle::PreparedOracle;
use tsbench::rng::{Stream, StreamRng};
use tsbench::series::mean_std;
use tsbench::suite::{cmd_evaluate, cmd_generate, resolve_suites, SuiteConfig};
use tsbench::{
    generate_dataset, DatasetSpec, EvalProtocol, GeneratorSpec, OracleClass, SyntheticDataset,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn suite(name: &str) -> SuiteConfig {
    SuiteConfig::builtin(name).expect("bundled suite parses")
}

fn dataset(cfg: &SuiteConfig, id: &str) -> SyntheticDataset {
    let spec = cfg
        .datasets
        .iter()
        .find(|d| d.id == id)
        .unwrap_or_else(|| panic!("dataset `{id}` in suite"));
    generate_dataset(spec).expect("bundled dataset generates")
}

fn evaluate(
    ds: &SyntheticDataset,
    protocol: &EvalProtocol,
    baselines: &[BaselineSpec],
) -> BTreeMap<String, ModelEval> {
    let (models, _) = evaluate_builtin(ds, protocol, baselines).expect("evaluation succeeds");
    models.into_iter().map(|m| (m.model.clone(), m)).collect()
}

fn at(models: &BTreeMap<String, ModelEval>, model: &str, h: usize) -> HorizonMetrics {
    models[model]
        .at(h)
        .unwrap_or_else(|| panic!("{model} at horizon {h}"))
        .clone()
}

// 1. Noiseless trend and periodic suites: oracle MSE and MAE exactly zero.
fn zero_floor() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in ["trend", "periodic"] {
        let cfg = suite(name);
        let dir = tempfile::tempdir().map_err(fail)?;
        let start = Instant::now();
        let report = cmd_evaluate(&cfg, dir.path(), &[]).map_err(fail)?;
        let secs = start.elapsed().as_secs_f64();
        let horizons_ok = cfg.protocol.horizons == [24, 48, 96, 192];
        let mut nonzero = Vec::new();
        for d in &report.datasets {
            let oracle = d
                .models
                .iter()
                .find(|m| m.model == "oracle")
                .ok_or("oracle missing")?;
            if oracle.horizons.len() != 4 {
                nonzero.push(format!("{} has {} horizons", d.id, oracle.horizons.len()));
            }
            for h in &oracle.horizons {
                if h.row.mse_obs != 0.0 || h.row.mae != 0.0 {
                    nonzero.push(format!(
                        "{}@{}: mse {} mae {}",
                        d.id, h.horizon, h.row.mse_obs, h.row.mae
                    ));
                }
            }
        }
        ok &= horizons_ok && nonzero.is_empty() && secs < 60.0;
        lines.push(format!(
            "{name}: {} datasets, nonzero {:?}, horizons {:?}, {secs:.1}s",
            report.datasets.len(),
            nonzero,
            cfg.protocol.horizons
        ));
    }
    check(ok, lines.join("; "))
}

// 2. White noise, mean oracle, H = 10, original scale.
fn white_noise_floor() -> Outcome {
    let cfg = suite("dependency");
    let ds = dataset(&cfg, "white_noise");
    let setup_ok = ds.spec.n == 5000
        && ds.spec.generator
            == (GeneratorSpec::WhiteNoise {
                sigma: 1.0,
                mean: 0.0,
            })
        && cfg.protocol.horizons == [10]
        && !cfg.protocol.scores_normalized();
    let m = at(&evaluate(&ds, &cfg.protocol, &[]), "oracle", 10);
    let v = m.row.mse_obs;
    check(
        setup_ok && (0.93..=1.07).contains(&v),
        format!(
            "mse_obs {v:.4} in [0.93, 1.07] (expected 1.0, standard error {:.3}, {} windows)",
            m.mse_std_error(),
            m.window_count
        ),
    )
}

// 3. Random walk, naive oracle, H = 10: E = σ² · Σ_{k=1..H} k / H.
fn random_walk_floor() -> Outcome {
    let cfg = suite("dependency");
    let ds = dataset(&cfg, "random_walk");
    let setup_ok = ds.spec.n == 5000
        && matches!(ds.spec.generator, GeneratorSpec::RandomWalk { sigma, .. } if sigma == 1.0)
        && cfg.protocol.horizons == [10]
        && !cfg.protocol.scores_normalized();
    let expected = (1..=10).map(f64::from).sum::<f64>() / 10.0;
    let m = at(&evaluate(&ds, &cfg.protocol, &[]), "oracle", 10);
    let v = m.row.mse_obs;
    check(
        setup_ok && (5.0..=6.0).contains(&v),
        format!(
            "mse_obs {v:.4} in [5.0, 6.0] (expected {expected}, standard error {:.3}, {} windows)",
            m.mse_std_error(),
            m.window_count
        ),
    )
}

// 4. ARMA(1,1) oracle against brute-force continuations of the true process.
fn arma_monte_carlo() -> Outcome {
    const PHI: f64 = 0.5;
    const THETA: f64 = 0.3;
    const REPS: usize = 100_000;
    const H: usize = 10;
    let cfg = suite("dependency");
    let ds = dataset(&cfg, "arma_1_1");
    let GeneratorSpec::Arma(spec) = &ds.spec.generator else {
        return Err("arma_1_1 is not an ARMA generator".into());
    };
    if spec.phi != [PHI]
        || spec.theta != [THETA]
        || spec.sigma != 1.0
        || spec.mu != 0.0
        || !spec.extra_lags.is_empty()
    {
        return Err(format!("unexpected ARMA spec {spec:?}"));
    }
    // ψ_0 = 1, ψ_j = (φ + θ) φ^(j−1).
    let psi: Vec<f64> = (0..H)
        .map(|j| {
            if j == 0 {
                1.0
            } else {
                (PHI + THETA) * PHI.powi(j as i32 - 1)
            }
        })
        .collect();
    let theory: Vec<f64> = (1..=H)
        .map(|h| psi[..h].iter().map(|p| p * p).sum())
        .collect();

    let x = ds.series.observed(0);
    // Innovations from the observed path; the zero start decays as θ^t.
    let mut e = vec![0.0; x.len()];
    for t in 1..x.len() {
        e[t] = x[t] - PHI * x[t - 1] - THETA * e[t - 1];
    }
    let oracle = PreparedOracle::new(&ds.series, &ds.classes, None).map_err(fail)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4_2024);
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut worst_mean_z = 0.0f64;
    for origin in [1000, 2000, 3000, 4000, 4900] {
        let fc = oracle.forecast(origin, H).map_err(fail)?;
        let fc = &fc[0];
        let mut se = [0.0; H];
        let mut sum = [0.0; H];
        for _ in 0..REPS {
            let (mut xp, mut ep) = (x[origin - 1], e[origin - 1]);
            for s in 0..H {
                let eps: f64 = StandardNormal.sample(&mut rng);
                let xs = PHI * xp + THETA * ep + eps;
                se[s] += (xs - fc[s]).powi(2);
                sum[s] += xs;
                xp = xs;
                ep = eps;
            }
        }
        for h in [1, 2, 5, 10] {
            let mse = se[h - 1] / REPS as f64;
            let rel = (mse - theory[h - 1]).abs() / theory[h - 1];
            let z =
                (sum[h - 1] / REPS as f64 - fc[h - 1]).abs() / (theory[h - 1] / REPS as f64).sqrt();
            worst = worst.max(rel);
            worst_mean_z = worst_mean_z.max(z);
            ok &= rel < 0.03 && z < 5.0;
        }
    }
    check(
        ok,
        format!(
            "worst relative MSE error {:.2}% over h in {{1,2,5,10}} (theory {:?}), worst mean z {worst_mean_z:.2}",
            worst * 100.0,
            [1, 2, 5, 10].map(|h| (theory[h - 1] * 1e4).round() / 1e4)
        ),
    )
}

fn unit_sine(n: usize, seed: u64, noise: Option<NoiseSpec>) -> DatasetSpec {
    let mut spec: DatasetSpec = serde_json::from_value(serde_json::json!({
        "id": "unit_sine",
        "n": n,
        "seed": seed,
        "generator": { "kind": "periodic", "wave": "sine", "amplitude": std::f64::consts::SQRT_2, "frequency": 0.01 },
    }))
    .expect("spec parses");
    spec.noise = noise;
    spec
}

// 5. Clean-signal oracle on SNR-calibrated noise.
fn noise_floor() -> Outcome {
    let protocol = EvalProtocol {
        horizons: vec![96],
        eval_on_original_scale: true,
        ..EvalProtocol::default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for snr in [30.0, 20.0, 10.0, 0.0, -10.0] {
        let spec = unit_sine(20_000, 900, Some(NoiseSpec::new(NoiseDist::Gaussian, snr)));
        let ds = generate_dataset(&spec).map_err(fail)?;
        let (_, std) = mean_std(ds.series.clean(0));
        let target = std * std * 10f64.powf(-snr / 10.0);
        let m = at(&evaluate(&ds, &protocol, &[]), "oracle", 96);
        let rel = (m.row.mse_obs - target).abs() / target;
        let mse_true = m.row.mse_true.ok_or("mse_true absent")?;
        ok &= rel < 0.05 && mse_true == 0.0 && (std * std - 1.0).abs() < 1e-9;
        parts.push(format!(
            "{snr} dB: rel {:.2}%, mse_true {mse_true}",
            rel * 100.0
        ));
    }
    check(ok, parts.join("; "))
}

// 6. Lévy at α = 2 is N(0, 2); other families are variance matched.
fn distributions() -> Outcome {
    let mut rng = StreamRng::for_stream(6, Stream::Noise(0));
    let levy = sample_levy_stable(2.0, 0.0, 100_000, &mut rng).map_err(fail)?;
    let (_, s) = mean_std(&levy);
    let levy_rel = (s * s - 2.0).abs() / 2.0;
    let mut ok = levy_rel < 0.05;
    let mut parts = vec![format!("levy a=2 var {:.4}", s * s)];
    for (name, dist) in [
        ("student_t df10", NoiseDist::StudentT { df: 10.0 }),
        ("laplace", NoiseDist::Laplace),
        ("uniform", NoiseDist::Uniform),
        ("gaussian", NoiseDist::Gaussian),
    ] {
        let ds = generate_dataset(&unit_sine(100_000, 61, Some(NoiseSpec::new(dist, 0.0))))
            .map_err(fail)?;
        let (_, cs) = mean_std(ds.series.clean(0));
        let target = cs * cs;
        let noise: Vec<f64> = ds
            .series
            .observed(0)
            .iter()
            .zip(ds.series.clean(0))
            .map(|(o, c)| o - c)
            .collect();
        let (_, ns) = mean_std(&noise);
        let rel = (ns * ns - target).abs() / target;
        ok &= rel < 0.05;
        parts.push(format!("{name} rel {:.2}%", rel * 100.0));
    }
    // Variance matching is also exposed directly on a series.
    let base = generate_dataset(&unit_sine(1000, 1, None)).map_err(fail)?;
    let (_, rec) =
        add_noise(&base.series, &NoiseSpec::new(NoiseDist::Laplace, 10.0), 3).map_err(fail)?;
    ok &= rec.is_some_and(|r| (r.sigma2[0] - 0.1).abs() < 1e-9);
    check(ok, parts.join("; "))
}

// 7. Anomalies stay in the first 80%; point counts are exact.
fn anomaly_region() -> Outcome {
    let cfg = suite("anomaly");
    let mut ok = true;
    let mut checked = 0;
    let mut problems = Vec::new();
    for spec in cfg.datasets.iter().filter(|d| !d.anomalies.is_empty()) {
        let ds = generate_dataset(spec).map_err(fail)?;
        let twin = generate_dataset(&spec.clean_twin()).map_err(fail)?;
        let n = spec.n;
        let tail = n - (0.2 * n as f64).round() as usize;
        for ch in 0..ds.series.n_channels() {
            let a = &ds.series.observed(ch)[tail..];
            let b = &twin.series.observed(ch)[tail..];
            if !a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()) {
                problems.push(format!("{}: tail differs", spec.id));
            }
        }
        for rec in &ds.anomalies {
            if let AnomalyKind::Point { rate, .. } = rec.spec.kind {
                let expected = (rate * 0.8 * n as f64).round() as usize;
                let mut pos = rec.positions.clone();
                pos.sort_unstable();
                pos.dedup();
                if pos.len() != expected || rec.positions.len() != expected {
                    problems.push(format!(
                        "{}: {} points, expected {expected}",
                        spec.id,
                        rec.positions.len()
                    ));
                }
            }
        }
        checked += 1;
    }
    ok &= problems.is_empty() && checked > 0;
    check(
        ok,
        format!("{checked} anomaly datasets, problems {problems:?}"),
    )
}

// 8. Baseline ordering on the dependency suite.
fn baseline_ordering() -> Outcome {
    let cfg = suite("dependency");
    let h = cfg.protocol.horizons[0];
    let mut ok = true;
    let mut parts = Vec::new();
    for spec in &cfg.datasets {
        if spec.n != 5000 {
            return Err(format!("{} has n = {}", spec.id, spec.n));
        }
        let ds = generate_dataset(spec).map_err(fail)?;
        let models = evaluate(&ds, &cfg.protocol, &cfg.baselines);
        let (o, nv, mn) = (
            at(&models, "oracle", h),
            at(&models, "naive", h),
            at(&models, "mean", h),
        );
        let tol = 2.0 * (nv.mse_std_error().powi(2) + mn.mse_std_error().powi(2)).sqrt();
        let (on, nn, mm) = (o.row.mse_obs, nv.row.mse_obs, mn.row.mse_obs);
        let this = match &ds.classes[0] {
            OracleClass::WhiteNoise { .. } => mm <= nn + tol,
            OracleClass::RandomWalk => nn <= mm + tol,
            OracleClass::Arma { .. } => on < nn && on < mm,
            _ => true,
        };
        ok &= this;
        parts.push(format!(
            "{}: oracle {on:.3} naive {nn:.3} mean {mm:.3} (2se {tol:.3})",
            spec.id
        ));
    }
    check(ok, parts.join("; "))
}

// 9. Lagged pair k = 48: var2 is known for steps ≤ k, white noise beyond.
fn cross_variable() -> Outcome {
    const LAG: usize = 48;
    let cfg = suite("cross_variable");
    let ds = dataset(&cfg, "lag_48");
    let sigma = match ds.spec.generator {
        GeneratorSpec::LaggedPair { lag, sigma } if lag == LAG => sigma,
        ref g => return Err(format!("unexpected generator {g:?}")),
    };
    let protocol = EvalProtocol {
        eval_on_original_scale: true,
        ..cfg.protocol.clone()
    };
    let h = 96;
    let ctx = EvalContext::new(&ds.series, &protocol).map_err(fail)?;
    let oracle = PreparedOracle::new(&ds.series, &ds.classes, ds.system.as_ref()).map_err(fail)?;
    let m = ctx.evaluate_horizon(&oracle, h).map_err(fail)?;
    let steps = &m.step_mse_true.as_ref().ok_or("mse_true absent")?[1];
    let covered_zero = steps[..LAG].iter().all(|v| *v == 0.0);
    // The optimum beyond the lag is E[var1] = 0, so the error is var1 itself.
    let var1 = ds.series.observed(0);
    let origins: Vec<usize> = ctx
        .windows(h)
        .map_err(fail)?
        .iter()
        .map(|w| w.origin())
        .collect();
    let mut identity_err = 0.0f64;
    for s in LAG..h {
        let direct = origins
            .iter()
            .map(|o| var1[o + s - LAG].powi(2))
            .sum::<f64>()
            / origins.len() as f64;
        identity_err = identity_err.max((steps[s] - direct).abs() / direct);
    }
    let beyond = steps[LAG..].iter().sum::<f64>() / (h - LAG) as f64;
    let distinct = ctx.eval_range().len();
    let tol = 3.0 * (2.0 / distinct as f64).sqrt();
    let rel = (beyond - sigma * sigma).abs() / (sigma * sigma);
    check(
        covered_zero && identity_err < 1e-9 && rel < tol,
        format!(
            "steps 1..={LAG} all zero: {covered_zero}; beyond mean {beyond:.4} vs sigma^2 {} (rel {:.2}%, 3se {:.2}%); identity err {identity_err:.1e}",
            sigma * sigma,
            rel * 100.0,
            tol * 100.0
        ),
    )
}

fn lv_spec(x0: f64, y0: f64, dt: f64) -> OdeSpec {
    OdeSpec {
        system: OdeSystem::LotkaVolterra {
            alpha: 1.1,
            beta: 0.4,
            gamma: 0.4,
            delta: 0.1,
            x0,
            y0,
        },
        dt,
        substeps: 1,
    }
}

fn lv_drift(dt: f64, t_end: f64) -> Result<f64, String> {
    let n = (t_end / dt).round() as usize + 1;
    let ts = integrate_ode(&lv_spec(10.0, 5.0, dt), n).map_err(fail)?;
    let v = |i: usize| {
        lotka_volterra_invariant(1.1, 0.4, 0.4, 0.1, ts.observed(0)[i], ts.observed(1)[i])
    };
    let v0 = v(0);
    Ok((0..n).map(|i| (v(i) - v0).abs()).fold(0.0, f64::max))
}

// 10. ODE conservation laws.
fn conservation() -> Outcome {
    let population = 1000.0;
    let sir = OdeSpec {
        system: OdeSystem::Sir {
            beta: 0.3,
            gamma: 0.1,
            population,
            s0: 990.0,
            i0: 10.0,
        },
        dt: 0.1,
        substeps: 1,
    };
    let ts = integrate_ode(&sir, 5000).map_err(fail)?;
    let total = |t: usize| (0..3).map(|c| ts.observed(c)[t]).sum::<f64>();
    let sir_drift = (1..5000)
        .map(|t| (total(t) - total(t - 1)).abs() / population)
        .fold(0.0, f64::max);

    let (xe, ye) = (0.4 / 0.1, 1.1 / 0.4);
    let eq = integrate_ode(&lv_spec(xe, ye, 0.01), 5000).map_err(fail)?;
    let residual = (0..5000)
        .map(|t| {
            (eq.observed(0)[t] - xe)
                .abs()
                .max((eq.observed(1)[t] - ye).abs())
        })
        .fold(0.0, f64::max);

    let coarse = lv_drift(0.05, 50.0)?;
    let fine = lv_drift(0.025, 50.0)?;
    let ratio = coarse / fine;
    check(
        sir_drift < 1e-9 && residual < 1e-6 && ratio >= 8.0,
        format!("SIR drift/step {sir_drift:.1e}; LV equilibrium residual {residual:.1e}; invariant drift ratio {ratio:.1}"),
    )
}

fn hash_dir(dir: &Path) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).map_err(fail)? {
            let path = entry.map_err(fail)?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let bytes = std::fs::read(&path).map_err(fail)?;
                let rel = path
                    .strip_prefix(dir)
                    .map_err(fail)?
                    .to_string_lossy()
                    .into_owned();
                let digest: String = Sha256::digest(&bytes)
                    .iter()
                    .map(|b| format!("{b:02x}"))
                    .collect();
                out.insert(rel, digest);
            }
        }
    }
    Ok(out)
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

// 11. Byte-identical generation and thread-count independent reports.
fn determinism() -> Outcome {
    let suites = resolve_suites("builtin:default").map_err(fail)?;
    let root = tempfile::tempdir().map_err(fail)?;
    for run in ["a", "b"] {
        for s in &suites {
            cmd_generate(s, &root.path().join(run).join(&s.name)).map_err(fail)?;
        }
    }
    let a = hash_dir(&root.path().join("a"))?;
    let b = hash_dir(&root.path().join("b"))?;
    let files_equal = a == b && !a.is_empty();

    for (run, threads) in [("j1", 1), ("j8", 8)] {
        in_pool(threads, || -> Result<(), String> {
            for s in &suites {
                cmd_evaluate(s, &root.path().join(run).join(&s.name), &[]).map_err(fail)?;
            }
            Ok(())
        })?;
    }
    let j1 = hash_dir(&root.path().join("j1"))?;
    let j8 = hash_dir(&root.path().join("j8"))?;
    let reports_equal = j1 == j8 && j1.keys().any(|k| k.ends_with("report.csv"));
    check(
        files_equal && reports_equal,
        format!(
            "{} generated files identical: {files_equal}; {} report files identical across 1 and 8 threads: {reports_equal}",
            a.len(),
            j1.len()
        ),
    )
}

// 12. Worked formula examples.
fn formulas() -> Outcome {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1.0);
    let mse: BTreeMap<String, f64> = [("A", 1e-4), ("B", 1e-2), ("C", 1e0)]
        .map(|(k, v)| (k.to_string(), v))
        .into();
    let radar = difficulty_scores(&mse).map_err(fail)?;
    let radar_ok = close(radar["A"], 1.0) && close(radar["B"], 0.5) && close(radar["C"], 0.0);
    let flat: BTreeMap<String, f64> = [("A", 0.3), ("B", 0.3), ("C", 0.3)]
        .map(|(k, v)| (k.to_string(), v))
        .into();
    let flat_ok = difficulty_scores(&flat)
        .map_err(fail)?
        .values()
        .all(|v| *v == 0.5);
    let d1 = degradation(0.03, 0.02).map_err(fail)?;
    let d2 = degradation(0.0884, 0.02).map_err(fail)?;
    let d3 = degradation(0.7, 0.7).map_err(fail)?;
    let zero_clean = degradation(0.1, 0.0).is_err();
    let smape = compute_metrics(&[2.0], &[1.0], None).map_err(fail)?.smape;
    let smape_ok = (smape - 200.0 / 3.0).abs() < 1e-9;
    check(
        radar_ok
            && flat_ok
            && close(d1, 0.5)
            && close(d2, 3.42)
            && d3 == 0.0
            && zero_clean
            && smape_ok,
        format!(
            "radar {:?}; flat all 0.5: {flat_ok}; degradation {d1}, {d2}, {d3}; smape {smape}",
            radar.values().collect::<Vec<_>>()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("zero-floor optimum", zero_floor),
        ("white-noise floor", white_noise_floor),
        ("random-walk floor", random_walk_floor),
        ("ARMA oracle vs Monte Carlo", arma_monte_carlo),
        ("noise-floor identity", noise_floor),
        ("distribution checks", distributions),
        ("anomaly region", anomaly_region),
        ("baseline ordering", baseline_ordering),
        ("cross-variable oracle", cross_variable),
        ("conservation", conservation),
        ("determinism", determinism),
        ("formula fidelity", formulas),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                println!("criterion {:2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
