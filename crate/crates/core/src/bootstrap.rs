// SPDX-License-Identifier: MIT OR Apache-2.0

//! Pair-preserving bootstrap of the changepoint location, percentile
//! intervals, and the sampling distribution of interval lengths.
//!
//! Each replicate draws `n` pairs with replacement and restores time order by
//! sorting the drawn indices, which keeps `(t, y)` pairs intact and keeps ties
//! in input order. The replicate is scanned like any other series; its
//! changepoint is reported on the original series' index axis, i.e. as the
//! original position of the last pair in the replicate's left segment.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CpError, Result};
use crate::quantile::quantile_sorted;
use crate::rng::{RngStream, StreamRng};
use crate::scan::{scan_slices, ScanWorkspace, DEFAULT_MIN_SEGMENT};
use crate::series::{validate, ProvenanceKind, SeriesProvenance, TimeSeries};

/// Replicates that happen to leave no admissible split are redrawn from a
/// fresh substream at most this many times.
const MAX_REDRAWS: u64 = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BootstrapConfig {
    /// Replicates per changepoint distribution.
    pub b_inner: usize,
    /// Outer repetitions for interval-length distributions.
    pub r_outer: usize,
    pub alpha_ci: f64,
    pub seed: u64,
    pub min_segment: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            b_inner: 1000,
            r_outer: 200,
            alpha_ci: 0.05,
            seed: 0,
            min_segment: DEFAULT_MIN_SEGMENT,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b_inner < 2 {
            return Err(CpError::InvalidParameter(format!("b_inner must be >= 2, got {}", self.b_inner)));
        }
        if self.r_outer < 2 {
            return Err(CpError::InvalidParameter(format!("r_outer must be >= 2, got {}", self.r_outer)));
        }
        if !(self.alpha_ci > 0.0 && self.alpha_ci < 1.0) {
            return Err(CpError::InvalidParameter(format!("alpha_ci must lie in (0, 1), got {}", self.alpha_ci)));
        }
        if self.min_segment == 0 {
            return Err(CpError::InvalidParameter("min_segment must be positive".into()));
        }
        Ok(())
    }

    /// Root stream for this configuration's seed.
    pub fn stream(&self) -> RngStream {
        RngStream::new(self.seed)
    }
}

/// Bootstrap changepoint estimates, sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BootstrapDistribution {
    values: Vec<f64>,
}

impl BootstrapDistribution {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(CpError::InvalidParameter("empty bootstrap distribution".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CpError::InvalidParameter("non-finite bootstrap value".into()));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn quantile(&self, p: f64) -> f64 {
        quantile_sorted(&self.values, p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub length: f64,
    pub level: f64,
}

/// Draw `n` original indices with replacement, returned in ascending order.
fn draw_sorted_indices(n: usize, rng: &mut StreamRng, counts: &mut Vec<u32>, out: &mut Vec<usize>) {
    counts.clear();
    counts.resize(n, 0);
    for _ in 0..n {
        counts[rng.random_range(0..n)] += 1;
    }
    out.clear();
    for (i, &c) in counts.iter().enumerate() {
        out.extend(std::iter::repeat_n(i, c as usize));
    }
}

/// One pair-preserving bootstrap replicate, ordered by `t`.
pub fn resample_pairs(series: &TimeSeries, stream: &RngStream) -> TimeSeries {
    let mut rng = stream.rng();
    let mut counts = Vec::new();
    let mut idx = Vec::new();
    draw_sorted_indices(series.len(), &mut rng, &mut counts, &mut idx);
    let t = idx.iter().map(|&i| series.t()[i]).collect();
    let y = idx.iter().map(|&i| series.y()[i]).collect();
    let provenance = SeriesProvenance::derived(ProvenanceKind::BootstrapReplicate, Some(stream.key()), series);
    TimeSeries::from_parts_unchecked(t, y, provenance)
}

#[derive(Default)]
struct ReplicateBuffers {
    counts: Vec<u32>,
    idx: Vec<usize>,
    t: Vec<f64>,
    y: Vec<f64>,
    scan: ScanWorkspace,
}

/// Changepoint of one replicate, on the original index axis (one-based).
fn replicate_changepoint(
    series: &TimeSeries,
    min_segment: usize,
    stream: &RngStream,
    buf: &mut ReplicateBuffers,
) -> Result<f64> {
    let n = series.len();
    for attempt in 0..=MAX_REDRAWS {
        let s = if attempt == 0 { *stream } else { stream.substream("redraw", attempt) };
        let mut rng = s.rng();
        draw_sorted_indices(n, &mut rng, &mut buf.counts, &mut buf.idx);
        buf.t.clear();
        buf.y.clear();
        buf.t.extend(buf.idx.iter().map(|&i| series.t()[i]));
        buf.y.extend(buf.idx.iter().map(|&i| series.y()[i]));
        match scan_slices(&buf.t, &buf.y, min_segment, &mut buf.scan, |_, _| {}) {
            Ok((k, _)) => return Ok((buf.idx[k - 1] + 1) as f64),
            Err(CpError::NoAdmissibleSplit { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(CpError::NoAdmissibleSplit { min_segment })
}

/// Bootstrap distribution of the changepoint from `b_inner` replicates.
///
/// Replicate `j` draws from `stream.substream("replicate", j)`, so the result
/// does not depend on thread count or scheduling.
pub fn bootstrap_changepoint_distribution(
    series: &TimeSeries,
    cfg: &BootstrapConfig,
    stream: &RngStream,
) -> Result<BootstrapDistribution> {
    cfg.validate()?;
    validate(series, cfg.min_segment)?;
    let values = (0..cfg.b_inner)
        .into_par_iter()
        .map_init(ReplicateBuffers::default, |buf, j| {
            replicate_changepoint(series, cfg.min_segment, &stream.substream("replicate", j as u64), buf)
        })
        .collect::<Result<Vec<f64>>>()?;
    BootstrapDistribution::from_values(values)
}

/// Percentile interval `(Q(α/2), Q(1 − α/2))` of a bootstrap distribution.
pub fn percentile_interval(dist: &BootstrapDistribution, alpha_ci: f64) -> Result<ConfidenceInterval> {
    if dist.is_empty() {
        return Err(CpError::InvalidParameter("empty bootstrap distribution".into()));
    }
    if !(alpha_ci > 0.0 && alpha_ci < 1.0) {
        return Err(CpError::InvalidParameter(format!("alpha_ci must lie in (0, 1), got {alpha_ci}")));
    }
    let lower = dist.quantile(alpha_ci / 2.0);
    let upper = dist.quantile(1.0 - alpha_ci / 2.0);
    Ok(ConfidenceInterval {
        lower,
        upper,
        length: upper - lower,
        level: 1.0 - alpha_ci,
    })
}

/// Sampling distribution of the percentile-interval length: `r_outer` fresh
/// bootstrap distributions, one interval length each, in repetition order.
pub fn lambda_distribution(series: &TimeSeries, cfg: &BootstrapConfig, stream: &RngStream) -> Result<Vec<f64>> {
    cfg.validate()?;
    validate(series, cfg.min_segment)?;
    (0..cfg.r_outer)
        .into_par_iter()
        .map(|r| {
            let dist = bootstrap_changepoint_distribution(series, cfg, &stream.substream("outer", r as u64))?;
            Ok(percentile_interval(&dist, cfg.alpha_ci)?.length)
        })
        .collect()
}
