// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use cpboot::report::{
    self, BootstrapSummary, Command, DetectResult, Report, RunManifest,
};
use cpboot::{
    bootstrap_changepoint_distribution, ci_length_test, load_csv, percentile_interval, power_curve,
    scan_changepoint, validate, BootstrapConfig, CpError, CurveSettings, NullMethod, RngStream,
    TestConfig,
};

/// Likelihood-ratio changepoint detection with bootstrap interval-length tests.
#[derive(Parser, Debug)]
#[command(name = "cpboot", version, about)]
struct Cli {
    /// Worker threads (defaults to one per core). Does not affect output.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Locate the most likely changepoint in a `t,y` CSV file.
    Detect(DetectArgs),
    /// Test whether a changepoint exists via bootstrap interval lengths.
    Test(TestArgs),
    /// Estimate power over a grid of effect sizes on synthetic series.
    Power(PowerArgs),
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    min_segment: u64,
    /// Also write the JSON report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write tabular output to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DetectArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Bootstrap replicates; when given, the report includes a percentile interval.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    bootstrap: Option<u64>,
    #[arg(long, default_value_t = 0.05, value_parser = unit_interval)]
    alpha_ci: f64,
}

#[derive(Args, Debug)]
struct TestSettings {
    /// Bootstrap replicates per changepoint distribution.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(2..))]
    bootstrap: u64,
    /// Outer repetitions per interval-length distribution.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(2..))]
    outer: u64,
    #[arg(long, default_value_t = 0.05, value_parser = unit_interval)]
    alpha_ci: f64,
    #[arg(long, default_value_t = 0.05, value_parser = unit_interval)]
    alpha_test: f64,
    #[arg(long = "null", default_value = "demean", value_parser = null_method)]
    null_method: NullMethod,
}

#[derive(Args, Debug)]
struct TestArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    settings: TestSettings,
}

#[derive(Args, Debug)]
struct PowerArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    settings: TestSettings,
    /// Comma-separated effect sizes in multiples of sigma.
    #[arg(long, required = true, value_delimiter = ',', num_args = 1.., value_parser = finite)]
    grid: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1.0, value_parser = positive)]
    sigma: f64,
    /// Last index of the first regime (default n/2).
    #[arg(long)]
    c0: Option<usize>,
    /// Synthetic series per grid point.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    repeats: u64,
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1)"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not positive"))
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} is not finite"))
    }
}

fn null_method(s: &str) -> Result<NullMethod, String> {
    s.parse().map_err(|e: CpError| e.to_string())
}

fn read_input(path: &Path) -> Result<(cpboot::TimeSeries, String), CpError> {
    let bytes = std::fs::read(path).map_err(|source| CpError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    Ok((load_csv(path)?, digest))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CpError> {
    std::fs::write(path, contents).map_err(|source| CpError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit_json(json: &str, out: Option<&Path>) -> Result<(), CpError> {
    if let Some(path) = out {
        write_file(path, json)?;
    }
    print_stdout(json)
}

fn print_stdout(text: &str) -> Result<(), CpError> {
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(text.as_bytes())
        .and_then(|()| stdout.flush())
        .map_err(|source| CpError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn bootstrap_config(settings: &TestSettings, common: &Common) -> BootstrapConfig {
    BootstrapConfig {
        b_inner: settings.bootstrap as usize,
        r_outer: settings.outer as usize,
        alpha_ci: settings.alpha_ci,
        seed: common.seed,
        min_segment: common.min_segment as usize,
    }
}

fn run_detect(args: &DetectArgs) -> Result<(), CpError> {
    let common = &args.common;
    let min_segment = common.min_segment as usize;
    let (series, digest) = read_input(&args.input)?;
    validate(&series, min_segment)?;
    let scan = scan_changepoint(&series, min_segment)?;

    let mut manifest = RunManifest::new(Command::Detect, common.seed, min_segment, series.len());
    manifest.input = Some(args.input.display().to_string());
    manifest.input_digest = Some(digest);

    let bootstrap = match args.bootstrap {
        Some(b) => {
            let cfg = BootstrapConfig {
                b_inner: b as usize,
                alpha_ci: args.alpha_ci,
                seed: common.seed,
                min_segment,
                ..Default::default()
            };
            let dist = bootstrap_changepoint_distribution(&series, &cfg, &cfg.stream())?;
            let interval = percentile_interval(&dist, args.alpha_ci)?;
            manifest.bootstrap = Some(cfg.b_inner);
            manifest.alpha_ci = Some(args.alpha_ci);
            Some(BootstrapSummary {
                interval,
                lambda: interval.length,
                median: dist.quantile(0.5),
            })
        }
        None => None,
    };

    if let Some(path) = &common.csv {
        write_file(path, &report::statistics_csv(&scan))?;
    }
    let report = Report {
        manifest,
        result: DetectResult::new(series.len(), &scan, bootstrap),
    };
    emit_json(&report::to_json(&report), common.out.as_deref())
}

fn run_test(args: &TestArgs) -> Result<(), CpError> {
    let common = &args.common;
    let min_segment = common.min_segment as usize;
    let (series, digest) = read_input(&args.input)?;
    validate(&series, min_segment)?;
    let cfg = TestConfig {
        bootstrap: bootstrap_config(&args.settings, common),
        alpha_test: args.settings.alpha_test,
        null_method: args.settings.null_method,
    };
    let result = ci_length_test(&series, &cfg, &RngStream::new(common.seed))?;

    let mut manifest = RunManifest::new(Command::Test, common.seed, min_segment, series.len());
    manifest.input = Some(args.input.display().to_string());
    manifest.input_digest = Some(digest);
    fill_test_settings(&mut manifest, &cfg);

    if let Some(path) = &common.csv {
        write_file(path, &report::lambda_csv(&result))?;
    }
    emit_json(&report::to_json(&Report { manifest, result }), common.out.as_deref())
}

fn fill_test_settings(manifest: &mut RunManifest, cfg: &TestConfig) {
    manifest.bootstrap = Some(cfg.bootstrap.b_inner);
    manifest.outer = Some(cfg.bootstrap.r_outer);
    manifest.alpha_ci = Some(cfg.bootstrap.alpha_ci);
    manifest.alpha_test = Some(cfg.alpha_test);
    manifest.null_method = Some(cfg.null_method);
}

fn run_power(args: &PowerArgs) -> Result<(), CpError> {
    let common = &args.common;
    let min_segment = common.min_segment as usize;
    let cfg = TestConfig {
        bootstrap: bootstrap_config(&args.settings, common),
        alpha_test: args.settings.alpha_test,
        null_method: args.settings.null_method,
    };
    let settings = CurveSettings {
        c0: args.c0.unwrap_or(args.n / 2),
        repeats: args.repeats as usize,
        ..CurveSettings::new(args.n, args.sigma)
    };
    let curve = power_curve(&args.grid, &settings, &cfg, &RngStream::new(common.seed))?;

    let mut manifest = RunManifest::new(Command::Power, common.seed, min_segment, args.n);
    fill_test_settings(&mut manifest, &cfg);
    manifest.grid = Some(args.grid.clone());
    manifest.sigma = Some(args.sigma);
    manifest.c0 = Some(settings.c0);
    manifest.repeats = Some(settings.repeats);

    let csv = report::power_csv(&curve);
    let json = report::to_json(&Report {
        manifest,
        result: curve,
    });
    if let Some(path) = &common.out {
        write_file(path, &json)?;
    }
    match &common.csv {
        Some(path) => {
            write_file(path, &csv)?;
            print_stdout(&json)
        }
        None => print_stdout(&csv),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Cmd::Detect(args) => run_detect(args),
        Cmd::Test(args) => run_test(args),
        Cmd::Power(args) => run_power(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
