// SPDX-License-Identifier: MIT OR Apache-2.0

//! Machine-readable run reports.
//!
//! Reports are JSON objects `{"manifest": ..., "result": ...}`. Floating-point
//! numbers are written with 17 significant digits so every value round-trips
//! exactly; non-finite values become `null`.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::bootstrap::ConfidenceInterval;
use crate::power::{NullMethod, PowerCurve, TestReport};
use crate::scan::ScanResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Detect,
    Test,
    Power,
}

/// Every parameter that determines a run's output. Fields that do not apply
/// to a command are recorded as `null`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub input: Option<String>,
    /// Hex SHA-256 of the input file bytes.
    pub input_digest: Option<String>,
    pub seed: u64,
    pub bootstrap: Option<usize>,
    pub outer: Option<usize>,
    pub alpha_ci: Option<f64>,
    pub alpha_test: Option<f64>,
    pub min_segment: usize,
    pub null_method: Option<NullMethod>,
    pub grid: Option<Vec<f64>>,
    pub n: usize,
    pub sigma: Option<f64>,
    pub c0: Option<usize>,
    pub repeats: Option<usize>,
}

impl RunManifest {
    pub fn new(command: Command, seed: u64, min_segment: usize, n: usize) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            input: None,
            input_digest: None,
            seed,
            bootstrap: None,
            outer: None,
            alpha_ci: None,
            alpha_test: None,
            min_segment,
            null_method: None,
            grid: None,
            n,
            sigma: None,
            c0: None,
            repeats: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitStatistic {
    pub k: usize,
    pub statistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BootstrapSummary {
    pub interval: ConfidenceInterval,
    /// Interval length λ.
    pub lambda: f64,
    pub median: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectResult {
    pub n: usize,
    pub c_hat: usize,
    pub max_statistic: f64,
    pub left_fit: crate::scan::SegmentFit,
    pub right_fit: crate::scan::SegmentFit,
    pub full_fit: crate::scan::SegmentFit,
    pub statistics: Vec<SplitStatistic>,
    pub bootstrap: Option<BootstrapSummary>,
}

impl DetectResult {
    pub fn new(n: usize, scan: &ScanResult, bootstrap: Option<BootstrapSummary>) -> Self {
        Self {
            n,
            c_hat: scan.c_hat,
            max_statistic: scan.max_statistic,
            left_fit: scan.left_fit,
            right_fit: scan.right_fit,
            full_fit: scan.full_fit,
            statistics: scan
                .admissible()
                .map(|(k, statistic)| SplitStatistic { k, statistic })
                .collect(),
            bootstrap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report<R> {
    pub manifest: RunManifest,
    pub result: R,
}

pub type DetectReport = Report<DetectResult>;
pub type TestRunReport = Report<TestReport>;
pub type PowerReport = Report<PowerCurve>;

/// Pretty JSON with every `f64` written to 17 significant digits.
struct Sig17Formatter {
    inner: PrettyFormatter<'static>,
}

impl Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Serialize `value` as report JSON, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(
        &mut out,
        Sig17Formatter {
            inner: PrettyFormatter::new(),
        },
    );
    value
        .serialize(&mut ser)
        .expect("report types serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// `effect_m,power` rows for a power curve.
pub fn power_csv(curve: &PowerCurve) -> String {
    let mut out = String::from("effect_m,power\n");
    for (m, p) in curve.effect_grid.iter().zip(&curve.power) {
        out.push_str(&format!("{m:?},{p:?}\n"));
    }
    out
}

/// `k,statistic` rows for every admissible split.
pub fn statistics_csv(scan: &ScanResult) -> String {
    let mut out = String::from("k,statistic\n");
    for (k, s) in scan.admissible() {
        out.push_str(&format!("{k},{s:?}\n"));
    }
    out
}

/// `rep,lambda1,lambda0` rows, one per outer repetition.
pub fn lambda_csv(report: &TestReport) -> String {
    let mut out = String::from("rep,lambda1,lambda0\n");
    for (r, (l1, l0)) in report
        .lambda1_samples
        .iter()
        .zip(&report.lambda0_samples)
        .enumerate()
    {
        out.push_str(&format!("{r},{l1:?},{l0:?}\n"));
    }
    out
}
