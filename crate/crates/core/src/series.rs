// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ordered bivariate series and CSV ingestion.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CpError, Result};

/// Where a series came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProvenanceKind {
    Observed,
    DemeanedNull,
    PermutedNull,
    BootstrapReplicate,
    Synthetic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesProvenance {
    pub kind: ProvenanceKind,
    pub seed: Option<u64>,
    /// Hex SHA-256 of the series this one was derived from.
    pub parent_digest: Option<String>,
}

impl SeriesProvenance {
    pub fn observed() -> Self {
        Self {
            kind: ProvenanceKind::Observed,
            seed: None,
            parent_digest: None,
        }
    }

    pub fn derived(kind: ProvenanceKind, seed: Option<u64>, parent: &TimeSeries) -> Self {
        Self {
            kind,
            seed,
            parent_digest: Some(parent.digest()),
        }
    }
}

/// Ordered `(t, y)` pairs with non-decreasing, finite `t` and finite `y`.
///
/// Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    t: Vec<f64>,
    y: Vec<f64>,
    provenance: SeriesProvenance,
}

/// Check the series invariants on raw columns.
///
/// `min_segment` of zero skips the length requirement beyond non-emptiness.
pub fn validate_parts(t: &[f64], y: &[f64], min_segment: usize) -> Result<()> {
    if t.len() != y.len() {
        return Err(CpError::LengthMismatch {
            t: t.len(),
            y: y.len(),
        });
    }
    for (index, (a, b)) in t.iter().zip(y).enumerate() {
        if !a.is_finite() || !b.is_finite() {
            return Err(CpError::NonFinite { index });
        }
    }
    if let Some(index) = t.windows(2).position(|w| w[1] < w[0]) {
        return Err(CpError::Unordered { index: index + 1 });
    }
    let required = (2 * min_segment).max(1);
    if t.len() < required {
        return Err(CpError::TooShort {
            n: t.len(),
            required,
        });
    }
    Ok(())
}

/// Validate a series against a minimum segment size: `n >= 2 * min_segment`.
pub fn validate(series: &TimeSeries, min_segment: usize) -> Result<()> {
    if min_segment == 0 {
        return Err(CpError::InvalidParameter("min_segment must be positive".into()));
    }
    validate_parts(&series.t, &series.y, min_segment)
}

impl TimeSeries {
    /// Build an observed series from columns already ordered by `t`.
    pub fn new(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        Self::with_provenance(t, y, SeriesProvenance::observed())
    }

    pub fn with_provenance(t: Vec<f64>, y: Vec<f64>, provenance: SeriesProvenance) -> Result<Self> {
        validate_parts(&t, &y, 0)?;
        Ok(Self { t, y, provenance })
    }

    /// Build a series from pairs in arbitrary order. The sort is stable, so
    /// pairs sharing a `t` keep their input order.
    pub fn from_unsorted(t: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(CpError::LengthMismatch {
                t: t.len(),
                y: y.len(),
            });
        }
        let mut pairs: Vec<(f64, f64)> = t.into_iter().zip(y).collect();
        if let Some(index) = pairs.iter().position(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(CpError::NonFinite { index });
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (t, y) = pairs.into_iter().unzip();
        Self::new(t, y)
    }

    /// Equally spaced series with `t_i = i` for `i = 1..=n`.
    pub fn indexed(y: Vec<f64>) -> Result<Self> {
        let t = (1..=y.len()).map(|i| i as f64).collect();
        Self::new(t, y)
    }

    pub(crate) fn from_parts_unchecked(t: Vec<f64>, y: Vec<f64>, provenance: SeriesProvenance) -> Self {
        debug_assert!(validate_parts(&t, &y, 0).is_ok());
        Self { t, y, provenance }
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn provenance(&self) -> &SeriesProvenance {
        &self.provenance
    }

    /// Hex SHA-256 over the little-endian bit patterns of every `(t, y)` pair.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update((self.len() as u64).to_le_bytes());
        for (a, b) in self.t.iter().zip(&self.y) {
            hasher.update(a.to_bits().to_le_bytes());
            hasher.update(b.to_bits().to_le_bytes());
        }
        let mut out = String::with_capacity(64);
        for byte in hasher.finalize() {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }

    /// Canonical CSV rendering (`t,y` header, shortest round-trip decimals).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,y\n");
        for (a, b) in self.t.iter().zip(&self.y) {
            let _ = writeln!(out, "{a:?},{b:?}");
        }
        out
    }
}

/// Parse CSV text with a `t,y` header into a series sorted by `t`.
pub fn parse_csv(text: &str) -> Result<TimeSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CpError::MalformedRow {
        line: 1,
        message: e.to_string(),
    })?;
    if header.len() != 2 || &header[0] != "t" || &header[1] != "y" {
        return Err(CpError::BadHeader {
            found: header.iter().collect::<Vec<_>>().join(","),
        });
    }

    let mut t = Vec::new();
    let mut y = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CpError::MalformedRow {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 2 {
            return Err(CpError::MalformedRow {
                line,
                message: format!("expected 2 fields, found {}", record.len()),
            });
        }
        let parse = |field: &str| -> Result<f64> {
            let v: f64 = field.parse().map_err(|_| CpError::MalformedRow {
                line,
                message: format!("`{field}` is not a number"),
            })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(CpError::NonFiniteRow { line })
            }
        };
        t.push(parse(&record[0])?);
        y.push(parse(&record[1])?);
    }
    if t.len() < 2 {
        return Err(CpError::TooShort {
            n: t.len(),
            required: 2,
        });
    }
    TimeSeries::from_unsorted(t, y)
}

/// Load a `t,y` CSV file. Rows are stably sorted by `t`.
pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeries> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| CpError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_file() {
        let s = parse_csv("t,y\n1,0.5\n2,0.7\n3,0.4\n").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.t(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.y(), &[0.5, 0.7, 0.4]);
    }

    #[test]
    fn sorts_by_time_stably() {
        let s = parse_csv("t,y\n3,10\n1,20\n2,30\n1,40\n").unwrap();
        assert_eq!(s.t(), &[1.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.y(), &[20.0, 40.0, 30.0, 10.0]);
    }

    #[test]
    fn nan_reports_line_number() {
        let err = parse_csv("t,y\n1,0.5\n2,NaN\n").unwrap_err();
        assert!(matches!(err, CpError::NonFiniteRow { line: 3 }), "{err}");
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let err = parse_csv("t,y\n1,0.5\n2,0.1\nx,3\n").unwrap_err();
        assert!(matches!(err, CpError::MalformedRow { line: 4, .. }), "{err}");
        let err = parse_csv("t,y\n1,0.5\n2\n").unwrap_err();
        assert!(matches!(err, CpError::MalformedRow { line: 3, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_header_and_short_files() {
        assert!(matches!(parse_csv("a,b\n1,2\n2,3\n"), Err(CpError::BadHeader { .. })));
        assert!(matches!(parse_csv("t,y\n1,2\n"), Err(CpError::TooShort { n: 1, .. })));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_csv("/nonexistent/file.csv"), Err(CpError::Io { .. })));
    }

    #[test]
    fn validate_cases() {
        let ten = TimeSeries::indexed((0..10).map(f64::from).collect()).unwrap();
        assert!(validate(&ten, 3).is_ok());
        let five = TimeSeries::indexed((0..5).map(f64::from).collect()).unwrap();
        assert!(matches!(validate(&five, 3), Err(CpError::TooShort { n: 5, required: 6 })));
        assert!(matches!(
            validate_parts(&[1.0, 3.0, 2.0], &[0.0; 3], 1),
            Err(CpError::Unordered { index: 2 })
        ));
        assert!(matches!(
            validate_parts(&[1.0, 2.0], &[0.0], 1),
            Err(CpError::LengthMismatch { .. })
        ));
        assert!(matches!(
            validate_parts(&[1.0, 2.0], &[0.0, f64::INFINITY], 1),
            Err(CpError::NonFinite { index: 1 })
        ));
        assert!(TimeSeries::new(vec![1.0, 3.0, 2.0], vec![0.0; 3]).is_err());
    }

    #[test]
    fn canonical_csv_round_trips() {
        let s = TimeSeries::from_unsorted(vec![0.1, 3.0, 2.5], vec![1.0 / 3.0, -2e-300, 7.25]).unwrap();
        let back = parse_csv(&s.to_csv()).unwrap();
        assert_eq!(back, s);
        assert_eq!(back.digest(), s.digest());
    }
}
