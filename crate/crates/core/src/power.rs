// SPDX-License-Identifier: MIT OR Apache-2.0

//! Confidence-interval-length test for the existence of a changepoint, and
//! Monte Carlo power curves over effect sizes measured in noise standard
//! deviations.
//!
//! The test compares the bootstrap interval lengths of the observed series
//! (λ1) with those of an estimated no-changepoint series (λ0). The critical
//! value `t_star` is the `alpha_test` quantile of the λ0 samples; the
//! hypothesis of no changepoint is rejected when the median λ1 is at or below
//! it, and power is the share of λ1 samples at or below it.

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bootstrap::{lambda_distribution, BootstrapConfig};
use crate::error::{CpError, Result};
use crate::null::{demean_null, permute_null};
use crate::quantile::{median, quantile};
use crate::rng::RngStream;
use crate::scan::scan_changepoint;
use crate::series::{validate, ProvenanceKind, SeriesProvenance, TimeSeries};

/// How the no-changepoint dataset is estimated from the observed one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NullMethod {
    /// Remove the fitted shift after the changepoint (keeps residual structure).
    #[default]
    Demean,
    /// Shuffle `y` against `t` (destroys all structure).
    Permute,
}

impl NullMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            NullMethod::Demean => "demean",
            NullMethod::Permute => "permute",
        }
    }
}

impl fmt::Display for NullMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NullMethod {
    type Err = CpError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "demean" => Ok(NullMethod::Demean),
            "permute" => Ok(NullMethod::Permute),
            other => Err(CpError::InvalidParameter(format!(
                "unknown null method `{other}` (expected demean or permute)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestConfig {
    pub bootstrap: BootstrapConfig,
    pub alpha_test: f64,
    pub null_method: NullMethod,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            bootstrap: BootstrapConfig::default(),
            alpha_test: 0.05,
            null_method: NullMethod::Demean,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        self.bootstrap.validate()?;
        if !(self.alpha_test > 0.0 && self.alpha_test < 1.0) {
            return Err(CpError::InvalidParameter(format!(
                "alpha_test must lie in (0, 1), got {}",
                self.alpha_test
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub null_method: NullMethod,
    pub c_hat: usize,
    pub lambda1_samples: Vec<f64>,
    pub lambda0_samples: Vec<f64>,
    pub t_star: f64,
    pub lambda1_point: f64,
    pub reject: bool,
    /// `lambda1_point / median(lambda0)`; `None` when the λ0 median is zero.
    pub q_hat: Option<f64>,
    pub power: f64,
}

/// Share of `lambda1` at or below `t_star`.
pub fn power_at(lambda1: &[f64], t_star: f64) -> f64 {
    if lambda1.is_empty() {
        return 0.0;
    }
    lambda1.iter().filter(|&&l| l <= t_star).count() as f64 / lambda1.len() as f64
}

pub fn power_estimate(report: &TestReport) -> f64 {
    power_at(&report.lambda1_samples, report.t_star)
}

/// Assemble a report from the two interval-length samples.
pub fn decide(
    lambda1_samples: Vec<f64>,
    lambda0_samples: Vec<f64>,
    alpha_test: f64,
    null_method: NullMethod,
    c_hat: usize,
) -> Result<TestReport> {
    if lambda1_samples.is_empty() || lambda0_samples.is_empty() {
        return Err(CpError::InvalidParameter("empty interval-length sample".into()));
    }
    let t_star = quantile(&lambda0_samples, alpha_test);
    let lambda1_point = median(&lambda1_samples);
    let lambda0_median = median(&lambda0_samples);
    let power = power_at(&lambda1_samples, t_star);
    Ok(TestReport {
        null_method,
        c_hat,
        t_star,
        lambda1_point,
        reject: lambda1_point <= t_star,
        q_hat: (lambda0_median != 0.0).then(|| lambda1_point / lambda0_median),
        power,
        lambda1_samples,
        lambda0_samples,
    })
}

/// Estimated no-changepoint series for `method`.
pub fn null_series(
    series: &TimeSeries,
    method: NullMethod,
    min_segment: usize,
    stream: &RngStream,
) -> Result<TimeSeries> {
    match method {
        NullMethod::Demean => demean_null(series, min_segment),
        NullMethod::Permute => Ok(permute_null(series, &stream.substream("null", 0))),
    }
}

/// Run the interval-length test on `series`.
///
/// λ1 and λ0 draw from the independent substreams `"lambda1"` and
/// `"lambda0"` of `stream`.
pub fn ci_length_test(series: &TimeSeries, cfg: &TestConfig, stream: &RngStream) -> Result<TestReport> {
    cfg.validate()?;
    let min_segment = cfg.bootstrap.min_segment;
    validate(series, min_segment)?;
    let c_hat = scan_changepoint(series, min_segment)?.c_hat;
    let null = null_series(series, cfg.null_method, min_segment, stream)?;
    let (lambda1, lambda0) = rayon::join(
        || lambda_distribution(series, &cfg.bootstrap, &stream.substream("lambda1", 0)),
        || lambda_distribution(&null, &cfg.bootstrap, &stream.substream("lambda0", 0)),
    );
    decide(lambda1?, lambda0?, cfg.alpha_test, cfg.null_method, c_hat)
}

/// Parameters of a synthetic at-most-one-changepoint series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmocParams {
    pub n: usize,
    /// Last index of the first regime (one-based).
    pub c0: usize,
    /// Mean shift after `c0`, in multiples of `sigma`.
    pub effect_m: f64,
    pub sigma: f64,
    pub beta0: f64,
    pub beta1: f64,
}

impl AmocParams {
    /// Defaults used for power curves: `c0 = ⌊n/2⌋`, flat zero mean.
    pub fn centered(n: usize, effect_m: f64, sigma: f64) -> Self {
        Self {
            n,
            c0: n / 2,
            effect_m,
            sigma,
            beta0: 0.0,
            beta1: 0.0,
        }
    }
}

/// `y_i = beta0 + beta1 i + effect_m sigma 1{i > c0} + ε_i`, `ε_i ~ N(0, sigma²)`,
/// at `t_i = i`.
pub fn generate_amoc(params: &AmocParams, min_segment: usize, stream: &RngStream) -> Result<TimeSeries> {
    let AmocParams {
        n,
        c0,
        effect_m,
        sigma,
        beta0,
        beta1,
    } = *params;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(CpError::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    if !(effect_m.is_finite() && beta0.is_finite() && beta1.is_finite()) {
        return Err(CpError::InvalidParameter("non-finite generator parameter".into()));
    }
    if min_segment == 0 || n < 2 * min_segment || c0 < min_segment || c0 > n - min_segment {
        return Err(CpError::InvalidParameter(format!(
            "c0 = {c0} must lie in {min_segment}..={} for n = {n}",
            n.saturating_sub(min_segment)
        )));
    }
    let noise = Normal::new(0.0, sigma).map_err(|e| CpError::InvalidParameter(e.to_string()))?;
    let mut rng = stream.rng();
    let shift = effect_m * sigma;
    let t: Vec<f64> = (1..=n).map(|i| i as f64).collect();
    let y = t
        .iter()
        .enumerate()
        .map(|(i, &ti)| {
            let step = if i + 1 > c0 { shift } else { 0.0 };
            beta0 + beta1 * ti + step + noise.sample(&mut rng)
        })
        .collect();
    let provenance = SeriesProvenance {
        kind: ProvenanceKind::Synthetic,
        seed: Some(stream.key()),
        parent_digest: None,
    };
    TimeSeries::with_provenance(t, y, provenance)
}

/// Settings shared by every point of a power curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveSettings {
    pub n: usize,
    pub sigma: f64,
    pub c0: usize,
    pub beta0: f64,
    pub beta1: f64,
    /// Synthetic datasets per grid point; reported power is their mean.
    pub repeats: usize,
}

impl CurveSettings {
    pub fn new(n: usize, sigma: f64) -> Self {
        Self {
            n,
            sigma,
            c0: n / 2,
            beta0: 0.0,
            beta1: 0.0,
            repeats: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerCurve {
    pub effect_grid: Vec<f64>,
    pub power: Vec<f64>,
    /// Share of repeats whose test rejected, per grid point.
    pub reject_rate: Vec<f64>,
    pub settings: CurveSettings,
    pub null_method: NullMethod,
    pub seed: u64,
}

/// Power of the interval-length test at each effect size in `effect_grid`.
///
/// Grid point `i`, repeat `r` uses `stream / ("grid", i) / ("repeat", r)`:
/// substream `"data"` generates the series and `"test"` drives the test.
pub fn power_curve(
    effect_grid: &[f64],
    settings: &CurveSettings,
    cfg: &TestConfig,
    stream: &RngStream,
) -> Result<PowerCurve> {
    if effect_grid.is_empty() {
        return Err(CpError::InvalidParameter("effect grid is empty".into()));
    }
    if settings.repeats == 0 {
        return Err(CpError::InvalidParameter("repeats must be positive".into()));
    }
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..effect_grid.len())
        .flat_map(|i| (0..settings.repeats).map(move |r| (i, r)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(i, r)| {
            let s = stream.substream("grid", i as u64).substream("repeat", r as u64);
            let params = AmocParams {
                n: settings.n,
                c0: settings.c0,
                effect_m: effect_grid[i],
                sigma: settings.sigma,
                beta0: settings.beta0,
                beta1: settings.beta1,
            };
            let series = generate_amoc(&params, cfg.bootstrap.min_segment, &s.substream("data", 0))?;
            let report = ci_length_test(&series, cfg, &s.substream("test", 0))?;
            Ok((report.power, report.reject))
        })
        .collect::<Result<Vec<(f64, bool)>>>()?;

    let reps = settings.repeats as f64;
    let (power, reject_rate) = outcomes
        .chunks(settings.repeats)
        .map(|chunk| {
            let p = chunk.iter().map(|o| o.0).sum::<f64>() / reps;
            let r = chunk.iter().filter(|o| o.1).count() as f64 / reps;
            (p, r)
        })
        .unzip();
    Ok(PowerCurve {
        effect_grid: effect_grid.to_vec(),
        power,
        reject_rate,
        settings: *settings,
        null_method: cfg.null_method,
        seed: cfg.bootstrap.seed,
    })
}
