// SPDX-License-Identifier: MIT OR Apache-2.0

//! Estimated no-changepoint datasets.
//!
//! The demeaned null removes the fitted shift after the estimated changepoint
//! and keeps the residual structure of the data. The permutation null shuffles
//! `y` against fixed `t` and keeps none of it.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::Result;
use crate::rng::RngStream;
use crate::scan::scan_changepoint;
use crate::series::{ProvenanceKind, SeriesProvenance, TimeSeries};

/// Difference of the right and left segment lines at the estimated split.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaEstimate {
    pub c_hat: usize,
    /// Intercept difference, right minus left.
    pub d0: f64,
    /// Slope difference, right minus left.
    pub d1: f64,
}

impl DeltaEstimate {
    /// Fitted mean shift at time `t`.
    pub fn delta_at(&self, t: f64) -> f64 {
        self.d0 + self.d1 * t
    }
}

pub fn estimate_delta(series: &TimeSeries, min_segment: usize) -> Result<DeltaEstimate> {
    let scan = scan_changepoint(series, min_segment)?;
    Ok(DeltaEstimate {
        c_hat: scan.c_hat,
        d0: scan.right_fit.beta0 - scan.left_fit.beta0,
        d1: scan.right_fit.beta1 - scan.left_fit.beta1,
    })
}

/// Subtract the fitted shift `delta_at(t_i)` from every point after the
/// estimated changepoint. Points up to and including it are untouched.
pub fn demean_null(series: &TimeSeries, min_segment: usize) -> Result<TimeSeries> {
    let delta = estimate_delta(series, min_segment)?;
    Ok(demean_with(series, &delta))
}

/// [`demean_null`] with a precomputed shift estimate.
pub fn demean_with(series: &TimeSeries, delta: &DeltaEstimate) -> TimeSeries {
    let y = series
        .t()
        .iter()
        .zip(series.y())
        .enumerate()
        .map(|(i, (&t, &y))| if i < delta.c_hat { y } else { y - delta.delta_at(t) })
        .collect();
    let provenance = SeriesProvenance::derived(ProvenanceKind::DemeanedNull, None, series);
    TimeSeries::from_parts_unchecked(series.t().to_vec(), y, provenance)
}

/// Shuffle `y` uniformly (Fisher–Yates) while keeping `t` fixed.
pub fn permute_null(series: &TimeSeries, stream: &RngStream) -> TimeSeries {
    let mut y = series.y().to_vec();
    y.shuffle(&mut stream.rng());
    let provenance = SeriesProvenance::derived(ProvenanceKind::PermutedNull, Some(stream.key()), series);
    TimeSeries::from_parts_unchecked(series.t().to_vec(), y, provenance)
}
