// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tsbench::suite::commands::{PLOT_CSV, REPORT_CSV};
use tsbench::suite::{
    builtin_names, builtin_source, cmd_emit_plot_data, cmd_emit_predictions, cmd_evaluate,
    cmd_generate, resolve_suites, SuiteConfig, BUILTIN_PREFIX, DEFAULT_SUITE,
};
use tsbench::{Error, Result};

/// Synthetic time-series benchmark: generate suites, score forecasts.
#[derive(Parser)]
#[command(name = "tsbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SuiteArgs {
    /// Suite file, `builtin:<name>`, or `builtin:default` for every bundled suite.
    #[arg(long)]
    suite: String,
    /// Output directory. Several suites go to `<out>/<suite name>/`.
    #[arg(long)]
    out: PathBuf,
    /// Added to every dataset seed.
    #[arg(long)]
    seed_override: Option<u64>,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Write `<id>.csv`, `<id>_clean.csv` and `<id>.meta.json` for every dataset.
    Generate(SuiteArgs),
    /// Score the oracle, baselines and external predictions; write reports.
    Evaluate {
        #[command(flatten)]
        suite: SuiteArgs,
        /// Prediction CSV files (glob, repeatable).
        #[arg(long)]
        predictions: Vec<String>,
    },
    /// Convert `report.csv` into long-format plot data.
    EmitPlotData {
        /// Directory holding `report.csv`; `plot_data.csv` is written next to it.
        #[arg(long)]
        out: PathBuf,
        /// Read this report instead of `<out>/report.csv`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write oracle or baseline forecasts in the prediction file format.
    EmitPredictions {
        #[command(flatten)]
        suite: SuiteArgs,
        /// `oracle` or a baseline name such as `naive` or `ar_fit_10`.
        #[arg(long, default_value = "oracle")]
        model: String,
        /// Model id written into the files; defaults to `<model>_copy`.
        #[arg(long)]
        label: Option<String>,
    },
    /// Print the TOML source of a bundled suite.
    ExportSuite {
        /// Bundled suite name.
        name: String,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List bundled suites.
    ListSuites,
}

fn load(args: &SuiteArgs) -> Result<Vec<(SuiteConfig, PathBuf)>> {
    let mut suites = resolve_suites(&args.suite)?;
    if let Some(offset) = args.seed_override {
        suites
            .iter_mut()
            .for_each(|s| s.apply_seed_override(offset));
    }
    let nested = suites.len() > 1;
    Ok(suites
        .into_iter()
        .map(|s| {
            let dir = if nested {
                args.out.join(&s.name)
            } else {
                args.out.clone()
            };
            (s, dir)
        })
        .collect())
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        b = b.num_threads(j);
    }
    let pool = b
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn expand_globs(patterns: &[String]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in patterns {
        let matches =
            glob::glob(p).map_err(|e| Error::Config(format!("--predictions `{p}`: {e}")))?;
        let before = out.len();
        for m in matches {
            let path = m.map_err(|e| {
                let p = e.path().to_path_buf();
                Error::io(p, e.into())
            })?;
            out.push(path);
        }
        if out.len() == before {
            return Err(Error::Config(format!(
                "--predictions `{p}` matched no files"
            )));
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(args) => with_jobs(args.jobs, || {
            for (suite, dir) in load(&args)? {
                let files = cmd_generate(&suite, &dir)?;
                println!(
                    "{}: wrote {} files to {}",
                    suite.name,
                    files.len(),
                    dir.display()
                );
            }
            Ok(())
        }),
        Command::Evaluate {
            suite: args,
            predictions,
        } => with_jobs(args.jobs, || {
            let suites = load(&args)?;
            let files = expand_globs(&predictions)?;
            if suites.len() > 1 && !files.is_empty() {
                return Err(Error::Config("--predictions needs a single suite".into()));
            }
            for (suite, dir) in suites {
                let report = cmd_evaluate(&suite, &dir, &files)?;
                println!(
                    "{}: {} datasets scored, report in {}",
                    suite.name,
                    report.datasets.len(),
                    dir.join(REPORT_CSV).display()
                );
            }
            Ok(())
        }),
        Command::EmitPlotData { out, report } => {
            let report = report.unwrap_or_else(|| out.join(REPORT_CSV));
            let path = cmd_emit_plot_data(&report, &out.join(PLOT_CSV))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::EmitPredictions {
            suite: args,
            model,
            label,
        } => with_jobs(args.jobs, || {
            let label = label.unwrap_or_else(|| format!("{model}_copy"));
            for (suite, dir) in load(&args)? {
                let files = cmd_emit_predictions(&suite, &model, &label, &dir)?;
                println!(
                    "{}: wrote {} prediction files to {}",
                    suite.name,
                    files.len(),
                    dir.display()
                );
            }
            Ok(())
        }),
        Command::ExportSuite { name, out } => {
            let name = name.strip_prefix(BUILTIN_PREFIX).unwrap_or(&name);
            let src = builtin_source(name)?;
            match out {
                Some(path) => write_file(&path, src),
                None => {
                    print!("{src}");
                    Ok(())
                }
            }
        }
        Command::ListSuites => {
            for name in builtin_names() {
                let s = SuiteConfig::builtin(name)?;
                println!(
                    "{name:<22}{:>4} datasets  {}",
                    s.datasets.len(),
                    s.description
                );
            }
            println!("{DEFAULT_SUITE:<22}every suite above");
            Ok(())
        }
    }
}

fn write_file(path: &Path, src: &str) -> Result<()> {
    std::fs::write(path, src).map_err(|e| Error::io(path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
