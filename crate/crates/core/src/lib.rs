// SPDX-License-Identifier: MIT OR Apache-2.0

//! At-most-one-changepoint detection for `(t, y)` series with a Gaussian
//! likelihood-ratio scan over segment-wise linear means, bootstrap
//! distributions of the changepoint location, and a hypothesis test on the
//! length of bootstrap percentile intervals.
//!
//! ```
//! use cpboot::{scan_changepoint, TimeSeries};
//!
//! let y = vec![0.0, 0.1, -0.1, 0.0, 0.2, 5.0, 5.1, 4.9, 5.2, 5.0];
//! let series = TimeSeries::indexed(y).unwrap();
//! let scan = scan_changepoint(&series, 3).unwrap();
//! assert_eq!(scan.c_hat, 5);
//! ```

pub mod bootstrap;
pub mod error;
pub mod null;
pub mod power;
pub mod quantile;
pub mod report;
pub mod rng;
pub mod scan;
pub mod series;

pub use bootstrap::{
    bootstrap_changepoint_distribution, lambda_distribution, percentile_interval, resample_pairs,
    BootstrapConfig, BootstrapDistribution, ConfidenceInterval,
};
pub use error::{CpError, Result};
pub use null::{demean_null, estimate_delta, permute_null, DeltaEstimate};
pub use power::{
    ci_length_test, generate_amoc, power_curve, power_estimate, AmocParams, CurveSettings, NullMethod,
    PowerCurve, TestConfig, TestReport,
};
pub use rng::RngStream;
pub use scan::{
    fit_segment, gaussian_loglik, lrt_statistic_at, scan_changepoint, ScanResult, SegmentFit,
    DEFAULT_MIN_SEGMENT,
};
pub use series::{load_csv, parse_csv, validate, ProvenanceKind, SeriesProvenance, TimeSeries};
