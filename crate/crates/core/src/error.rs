// SPDX-License-Identifier: MIT OR Apache-2.0

use std::path::PathBuf;

/// Errors produced by the changepoint engine.
#[derive(Debug, thiserror::Error)]
pub enum CpError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("line {line}: non-finite value")]
    NonFiniteRow { line: u64 },
    #[error("expected header `t,y`, found `{found}`")]
    BadHeader { found: String },
    #[error("series has {n} points; at least {required} required")]
    TooShort { n: usize, required: usize },
    #[error("t and y lengths differ ({t} vs {y})")]
    LengthMismatch { t: usize, y: usize },
    #[error("t is not non-decreasing at index {index}")]
    Unordered { index: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("segment {lo}..={hi} out of range for series of {n} points")]
    SegmentOutOfRange { lo: usize, hi: usize, n: usize },
    #[error("segment of {len} points is shorter than the minimum of {min}")]
    SegmentTooShort { len: usize, min: usize },
    #[error("split {k} outside admissible range {lo}..={hi}")]
    SplitOutOfRange { k: usize, lo: usize, hi: usize },
    #[error("no admissible split: every candidate leaves fewer than {min_segment} distinct times on a side")]
    NoAdmissibleSplit { min_segment: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = CpError> = std::result::Result<T, E>;
