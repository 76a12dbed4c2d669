// SPDX-License-Identifier: MIT OR Apache-2.0

//! Segment least-squares fits and the Gaussian likelihood-ratio changepoint
//! scan.
//!
//! A split `k` puts points `1..=k` in the left segment and `k+1..=n` in the
//! right one, so the reported changepoint is the last index of the left
//! segment (equivalently, the left segment length). Each segment carries its
//! own line `beta0 + beta1 * t` and its own MLE variance; the statistic at `k`
//! is the log likelihood ratio of the two-segment fit against the pooled fit.
//!
//! A split is admissible when `min_segment <= k <= n - min_segment`, it falls
//! between two distinct time values, and each side holds at least
//! `min_segment` distinct time values. The last two conditions only bite on
//! series with tied times (bootstrap replicates): a segment with fewer than
//! three distinct times is fitted exactly by a line and would otherwise win
//! the scan on the variance floor alone.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{CpError, Result};
use crate::series::TimeSeries;

/// Default minimum segment size: the smallest segment with a residual degree
/// of freedom after a two-parameter fit.
pub const DEFAULT_MIN_SEGMENT: usize = 3;

const FLOOR_REL: f64 = 1e-12;
const FLOOR_ABS: f64 = 1e-12;

/// Ordinary least-squares line and MLE variance for one segment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SegmentFit {
    pub beta0: f64,
    pub beta1: f64,
    /// `RSS / m`, clamped below by the series variance floor.
    pub sigma2_mle: f64,
    pub m: usize,
}

impl SegmentFit {
    /// Fitted mean at time `t`.
    pub fn mean_at(&self, t: f64) -> f64 {
        self.beta0 + self.beta1 * t
    }
}

/// Lower clamp for segment variances: `max(1e-12, 1e-12 * var(y))`, with the
/// MLE (divide-by-n) variance of the whole series.
pub fn variance_floor(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    if y.is_empty() {
        return FLOOR_ABS;
    }
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    FLOOR_ABS.max(FLOOR_REL * var)
}

/// Maximized Gaussian log-likelihood of a fitted segment,
/// `-(m/2) * (ln(2π σ²) + 1)`.
pub fn gaussian_loglik(fit: &SegmentFit) -> f64 {
    -0.5 * fit.m as f64 * ((2.0 * PI * fit.sigma2_mle).ln() + 1.0)
}

fn fit_range(t: &[f64], y: &[f64], floor: f64) -> SegmentFit {
    let m = t.len();
    let mf = m as f64;
    let t_mean = t.iter().sum::<f64>() / mf;
    let y_mean = y.iter().sum::<f64>() / mf;
    let (beta0, beta1) = if t[0] == t[m - 1] {
        (y_mean, 0.0)
    } else {
        let mut stt = 0.0;
        let mut sty = 0.0;
        for (a, b) in t.iter().zip(y) {
            let dt = a - t_mean;
            stt += dt * dt;
            sty += dt * (b - y_mean);
        }
        let slope = sty / stt;
        (y_mean - slope * t_mean, slope)
    };
    let rss: f64 = t
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - beta0 - beta1 * a;
            r * r
        })
        .sum();
    SegmentFit {
        beta0,
        beta1,
        sigma2_mle: (rss / mf).max(floor),
        m,
    }
}

/// Least-squares fit over the inclusive, zero-based index range `lo..=hi`.
///
/// When every `t` in the range is equal the slope is pinned to zero and the
/// fit is intercept-only.
pub fn fit_segment(series: &TimeSeries, lo: usize, hi: usize, min_segment: usize) -> Result<SegmentFit> {
    let n = series.len();
    if lo > hi || hi >= n {
        return Err(CpError::SegmentOutOfRange { lo, hi, n });
    }
    let len = hi - lo + 1;
    if len < min_segment.max(1) {
        return Err(CpError::SegmentTooShort { len, min: min_segment });
    }
    let floor = variance_floor(series.y());
    Ok(fit_range(&series.t()[lo..=hi], &series.y()[lo..=hi], floor))
}

fn check_split(series: &TimeSeries, k: usize, min_segment: usize) -> Result<()> {
    if min_segment == 0 {
        return Err(CpError::InvalidParameter("min_segment must be positive".into()));
    }
    let n = series.len();
    if n < 2 * min_segment {
        return Err(CpError::TooShort {
            n,
            required: 2 * min_segment,
        });
    }
    if k < min_segment || k > n - min_segment {
        return Err(CpError::SplitOutOfRange {
            k,
            lo: min_segment,
            hi: n - min_segment,
        });
    }
    Ok(())
}

/// Log likelihood ratio of the split after point `k` (one-based) against the
/// unsplit fit.
///
/// Defined for every `k` in `min_segment..=n - min_segment`, including splits
/// the scan would skip because of tied times.
pub fn lrt_statistic_at(series: &TimeSeries, k: usize, min_segment: usize) -> Result<f64> {
    check_split(series, k, min_segment)?;
    let (t, y) = (series.t(), series.y());
    let floor = variance_floor(y);
    let left = fit_range(&t[..k], &y[..k], floor);
    let right = fit_range(&t[k..], &y[k..], floor);
    let full = fit_range(t, y, floor);
    Ok(gaussian_loglik(&left) + gaussian_loglik(&right) - gaussian_loglik(&full))
}

/// Outcome of scanning every candidate split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    /// Smallest candidate split; `statistic[i]` belongs to `k = first_split + i`.
    pub first_split: usize,
    /// Log-LRT per candidate split, `None` where the split is inadmissible.
    pub statistic: Vec<Option<f64>>,
    pub c_hat: usize,
    pub max_statistic: f64,
    pub left_fit: SegmentFit,
    pub right_fit: SegmentFit,
    pub full_fit: SegmentFit,
}

impl ScanResult {
    /// `(k, statistic)` for every admissible split.
    pub fn admissible(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.statistic
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|v| (self.first_split + i, v)))
    }
}

/// Running centered co-moments (Welford), so segment RSS never comes from
/// differencing large raw sums.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: f64,
    t_mean: f64,
    y_mean: f64,
    ctt: f64,
    cty: f64,
    cyy: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, t: f64, y: f64) {
        self.n += 1.0;
        let inv = self.n.recip();
        let dt = t - self.t_mean;
        self.t_mean += dt * inv;
        let dy = y - self.y_mean;
        self.y_mean += dy * inv;
        self.ctt += dt * (t - self.t_mean);
        self.cty += dt * (y - self.y_mean);
        self.cyy += dy * (y - self.y_mean);
    }

    // `ctt` is exactly zero when every pushed `t` is identical.
    #[inline]
    fn rss(&self) -> f64 {
        if self.ctt > 0.0 {
            (self.cyy - self.cty * self.cty / self.ctt).max(0.0)
        } else {
            self.cyy.max(0.0)
        }
    }

    #[inline]
    fn log_var(&self, floor: f64) -> f64 {
        (self.rss() / self.n).max(floor).ln()
    }
}

/// Reusable buffers for repeated scans of same-length series.
#[derive(Debug, Default)]
pub(crate) struct ScanWorkspace {
    right: Vec<Moments>,
    distinct_left: Vec<u32>,
}

/// Scan raw sorted columns. Calls `visit(k, stat)` for every admissible split
/// in increasing `k` and returns the smallest maximizer with its statistic.
pub(crate) fn scan_slices(
    t: &[f64],
    y: &[f64],
    min_segment: usize,
    ws: &mut ScanWorkspace,
    mut visit: impl FnMut(usize, f64),
) -> Result<(usize, f64)> {
    let n = t.len();
    if min_segment == 0 {
        return Err(CpError::InvalidParameter("min_segment must be positive".into()));
    }
    if n < 2 * min_segment {
        return Err(CpError::TooShort {
            n,
            required: 2 * min_segment,
        });
    }
    let floor = variance_floor(y);

    // distinct_left[k] = number of distinct t among the first k points.
    ws.distinct_left.clear();
    ws.distinct_left.reserve(n + 1);
    ws.distinct_left.push(0);
    let mut distinct = 0u32;
    for i in 0..n {
        if i == 0 || t[i] != t[i - 1] {
            distinct += 1;
        }
        ws.distinct_left.push(distinct);
    }
    let total_distinct = distinct as usize;

    // right[k] holds the moments of points k..n (zero-based start).
    ws.right.clear();
    ws.right.resize(n + 1, Moments::default());
    let mut acc = Moments::default();
    for i in (0..n).rev() {
        acc.push(t[i], y[i]);
        ws.right[i] = acc;
    }
    let full_term = n as f64 * ws.right[0].log_var(floor);

    let mut left = Moments::default();
    let mut best: Option<(usize, f64)> = None;
    for k in 1..=n - min_segment {
        left.push(t[k - 1], y[k - 1]);
        if k < min_segment || t[k - 1] == t[k] {
            continue;
        }
        let dl = ws.distinct_left[k] as usize;
        if dl < min_segment || total_distinct - dl < min_segment {
            continue;
        }
        let right = &ws.right[k];
        let stat = 0.5
            * (full_term - k as f64 * left.log_var(floor) - (n - k) as f64 * right.log_var(floor));
        visit(k, stat);
        if best.is_none_or(|(_, b)| stat > b) {
            best = Some((k, stat));
        }
    }
    best.ok_or(CpError::NoAdmissibleSplit { min_segment })
}

/// Scan every admissible split and return the maximizing changepoint.
///
/// Ties on the statistic resolve to the smallest `k`. Cost is `O(n)`.
pub fn scan_changepoint(series: &TimeSeries, min_segment: usize) -> Result<ScanResult> {
    let n = series.len();
    if min_segment == 0 {
        return Err(CpError::InvalidParameter("min_segment must be positive".into()));
    }
    if n < 2 * min_segment {
        return Err(CpError::TooShort {
            n,
            required: 2 * min_segment,
        });
    }
    let (t, y) = (series.t(), series.y());
    let mut statistic = vec![None; n - 2 * min_segment + 1];
    let mut ws = ScanWorkspace::default();
    let (c_hat, max_statistic) = scan_slices(t, y, min_segment, &mut ws, |k, s| {
        statistic[k - min_segment] = Some(s);
    })?;
    let floor = variance_floor(y);
    Ok(ScanResult {
        first_split: min_segment,
        statistic,
        c_hat,
        max_statistic,
        left_fit: fit_range(&t[..c_hat], &y[..c_hat], floor),
        right_fit: fit_range(&t[c_hat..], &y[c_hat..], floor),
        full_fit: fit_range(t, y, floor),
    })
}
