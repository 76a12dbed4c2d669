// SPDX-License-Identifier: MIT OR Apache-2.0

//! C ABI for the cpboot changepoint engine.
//!
//! ## Conventions
//!
//! - Series and test reports are opaque handles created by `cpb_*_new`-style
//!   functions and released with the matching `*_free`.
//! - Fallible functions return a [`CpbStatus`]; on failure a description is
//!   available from [`cpb_last_error_message`] on the same thread.
//! - Output buffers are caller-owned. Functions that fill a buffer take its
//!   capacity and fail with `CPB_STATUS_BUFFER_TOO_SMALL` if it is too short.
//! - Strings returned by the library are released with [`cpb_string_free`].
//! - Panics never cross the boundary; they surface as `CPB_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cpboot::power::{self, NullMethod};
use cpboot::{BootstrapConfig, BootstrapDistribution, CpError, CurveSettings, RngStream, TestConfig, TimeSeries};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Io = 3,
    Parse = 4,
    NoAdmissibleSplit = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Null-dataset construction for the interval-length test.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CpbNullMethod {
    Demean = 0,
    Permute = 1,
}

impl From<CpbNullMethod> for NullMethod {
    fn from(m: CpbNullMethod) -> Self {
        match m {
            CpbNullMethod::Demean => NullMethod::Demean,
            CpbNullMethod::Permute => NullMethod::Permute,
        }
    }
}

/// Opaque series handle.
pub struct CpbSeries(TimeSeries);

/// Opaque test report handle.
pub struct CpbTestReport(power::TestReport);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CpbSegmentFit {
    pub beta0: f64,
    pub beta1: f64,
    pub sigma2_mle: f64,
    pub m: usize,
}

impl From<cpboot::SegmentFit> for CpbSegmentFit {
    fn from(f: cpboot::SegmentFit) -> Self {
        Self {
            beta0: f.beta0,
            beta1: f.beta1,
            sigma2_mle: f.sigma2_mle,
            m: f.m,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CpbScanSummary {
    pub c_hat: usize,
    pub max_statistic: f64,
    /// Smallest candidate split; statistics buffers start here.
    pub first_split: usize,
    /// Number of candidate splits, `n - 2 * min_segment + 1`.
    pub n_splits: usize,
    pub left_fit: CpbSegmentFit,
    pub right_fit: CpbSegmentFit,
    pub full_fit: CpbSegmentFit,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpbBootstrapConfig {
    pub b_inner: usize,
    pub r_outer: usize,
    pub alpha_ci: f64,
    pub seed: u64,
    pub min_segment: usize,
}

impl From<&CpbBootstrapConfig> for BootstrapConfig {
    fn from(c: &CpbBootstrapConfig) -> Self {
        Self {
            b_inner: c.b_inner,
            r_outer: c.r_outer,
            alpha_ci: c.alpha_ci,
            seed: c.seed,
            min_segment: c.min_segment,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CpbTestConfig {
    pub bootstrap: CpbBootstrapConfig,
    pub alpha_test: f64,
    pub null_method: CpbNullMethod,
}

impl From<&CpbTestConfig> for TestConfig {
    fn from(c: &CpbTestConfig) -> Self {
        Self {
            bootstrap: (&c.bootstrap).into(),
            alpha_test: c.alpha_test,
            null_method: c.null_method.into(),
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CpbInterval {
    pub lower: f64,
    pub upper: f64,
    pub length: f64,
    pub level: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CpbTestSummary {
    pub c_hat: usize,
    pub t_star: f64,
    pub lambda1_point: f64,
    pub reject: bool,
    /// NaN when the median null interval length is zero.
    pub q_hat: f64,
    pub power: f64,
    /// Length of each lambda sample buffer.
    pub n_samples: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).unwrap_or_default());
}

fn status_of(err: &CpError) -> CpbStatus {
    match err {
        CpError::Io { .. } => CpbStatus::Io,
        CpError::MalformedRow { .. } | CpError::NonFiniteRow { .. } | CpError::BadHeader { .. } => CpbStatus::Parse,
        CpError::NoAdmissibleSplit { .. } => CpbStatus::NoAdmissibleSplit,
        _ => CpbStatus::InvalidInput,
    }
}

/// Run `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), (CpbStatus, String)>) -> CpbStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            CpbStatus::Ok
        }
        Ok(Err((status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            CpbStatus::Panic
        }
    }
}

fn engine(err: CpError) -> (CpbStatus, String) {
    (status_of(&err), err.to_string())
}

fn null_arg(name: &str) -> (CpbStatus, String) {
    (CpbStatus::NullPointer, format!("`{name}` is null"))
}

unsafe fn slice_arg<'a, T>(ptr: *const T, len: usize, name: &str) -> Result<&'a [T], (CpbStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null_arg(name));
    }
    // SAFETY: caller guarantees `ptr` points at `len` readable values.
    Ok(unsafe { std::slice::from_raw_parts(ptr, len) })
}

unsafe fn ref_arg<'a, T>(ptr: *const T, name: &str) -> Result<&'a T, (CpbStatus, String)> {
    // SAFETY: caller guarantees a non-null `ptr` is valid for reads.
    unsafe { ptr.as_ref() }.ok_or_else(|| null_arg(name))
}

fn fill(out: *mut f64, capacity: usize, values: &[f64]) -> Result<(), (CpbStatus, String)> {
    if capacity < values.len() {
        return Err((
            CpbStatus::BufferTooSmall,
            format!("buffer holds {capacity} values, {} required", values.len()),
        ));
    }
    if values.is_empty() {
        return Ok(());
    }
    if out.is_null() {
        return Err(null_arg("out"));
    }
    // SAFETY: `out` has room for `capacity >= values.len()` values.
    unsafe { ptr::copy_nonoverlapping(values.as_ptr(), out, values.len()) };
    Ok(())
}

fn store<T>(out: *mut *mut T, value: T) -> Result<(), (CpbStatus, String)> {
    if out.is_null() {
        return Err(null_arg("out"));
    }
    // SAFETY: `out` is non-null and writable per the caller contract.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message describing the last failure on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn cpb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version; release with [`cpb_string_free`].
#[no_mangle]
pub extern "C" fn cpb_version() -> *mut c_char {
    CString::new(env!("CARGO_PKG_VERSION")).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpb_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: `s` came from `CString::into_raw` in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Defaults: 1000 replicates, 200 outer repetitions, alpha 0.05, seed 0,
/// minimum segment 3.
#[no_mangle]
pub extern "C" fn cpb_bootstrap_config_default() -> CpbBootstrapConfig {
    let d = BootstrapConfig::default();
    CpbBootstrapConfig {
        b_inner: d.b_inner,
        r_outer: d.r_outer,
        alpha_ci: d.alpha_ci,
        seed: d.seed,
        min_segment: d.min_segment,
    }
}

#[no_mangle]
pub extern "C" fn cpb_test_config_default() -> CpbTestConfig {
    CpbTestConfig {
        bootstrap: cpb_bootstrap_config_default(),
        alpha_test: 0.05,
        null_method: CpbNullMethod::Demean,
    }
}

/// Build a series from `n` pairs. Pairs need not be ordered; they are sorted
/// stably by `t`.
///
/// # Safety
/// `t` and `y` must each point at `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_series_new(t: *const f64, y: *const f64, n: usize, out: *mut *mut CpbSeries) -> CpbStatus {
    guard(|| {
        let t = unsafe { slice_arg(t, n, "t")? };
        let y = unsafe { slice_arg(y, n, "y")? };
        let series = TimeSeries::from_unsorted(t.to_vec(), y.to_vec()).map_err(engine)?;
        store(out, CpbSeries(series))
    })
}

/// Load a `t,y` CSV file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_series_load_csv(path: *const c_char, out: *mut *mut CpbSeries) -> CpbStatus {
    guard(|| {
        if path.is_null() {
            return Err(null_arg("path"));
        }
        // SAFETY: caller guarantees a NUL-terminated string.
        let path = unsafe { CStr::from_ptr(path) }
            .to_str()
            .map_err(|_| (CpbStatus::InvalidInput, "path is not valid UTF-8".to_string()))?;
        let series = cpboot::load_csv(path).map_err(engine)?;
        store(out, CpbSeries(series))
    })
}

/// # Safety
/// `series` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpb_series_free(series: *mut CpbSeries) {
    if !series.is_null() {
        // SAFETY: handle was produced by `Box::into_raw`.
        drop(unsafe { Box::from_raw(series) });
    }
}

/// Number of pairs, or 0 for a NULL handle.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cpb_series_len(series: *const CpbSeries) -> usize {
    unsafe { series.as_ref() }.map_or(0, |s| s.0.len())
}

/// Copy the `t` and `y` columns into caller buffers of `capacity` doubles.
///
/// # Safety
/// `series` must be a live handle; `t_out`/`y_out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cpb_series_columns(
    series: *const CpbSeries,
    t_out: *mut f64,
    y_out: *mut f64,
    capacity: usize,
) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        fill(t_out, capacity, s.0.t())?;
        fill(y_out, capacity, s.0.y())
    })
}

/// Scan every admissible split.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_scan(series: *const CpbSeries, min_segment: usize, out: *mut CpbScanSummary) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let r = cpboot::scan_changepoint(&s.0, min_segment).map_err(engine)?;
        let summary = CpbScanSummary {
            c_hat: r.c_hat,
            max_statistic: r.max_statistic,
            first_split: r.first_split,
            n_splits: r.statistic.len(),
            left_fit: r.left_fit.into(),
            right_fit: r.right_fit.into(),
            full_fit: r.full_fit.into(),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = summary };
        Ok(())
    })
}

/// Per-split log-LRT values starting at split `min_segment`; inadmissible
/// splits are written as NaN. The buffer needs `n - 2 * min_segment + 1` slots.
///
/// # Safety
/// `series` must be a live handle; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cpb_scan_statistics(
    series: *const CpbSeries,
    min_segment: usize,
    out: *mut f64,
    capacity: usize,
) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        let r = cpboot::scan_changepoint(&s.0, min_segment).map_err(engine)?;
        let values: Vec<f64> = r.statistic.iter().map(|v| v.unwrap_or(f64::NAN)).collect();
        fill(out, capacity, &values)
    })
}

/// Log-LRT of the split after point `k` (one-based).
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_lrt_statistic_at(
    series: *const CpbSeries,
    k: usize,
    min_segment: usize,
    out: *mut f64,
) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let v = cpboot::lrt_statistic_at(&s.0, k, min_segment).map_err(engine)?;
        // SAFETY: checked non-null above.
        unsafe { *out = v };
        Ok(())
    })
}

/// Sorted bootstrap changepoint estimates; `out` needs `cfg->b_inner` slots.
///
/// # Safety
/// `series` and `cfg` must be valid; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cpb_bootstrap_distribution(
    series: *const CpbSeries,
    cfg: *const CpbBootstrapConfig,
    out: *mut f64,
    capacity: usize,
) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        let cfg: BootstrapConfig = unsafe { ref_arg(cfg, "cfg")? }.into();
        let dist = cpboot::bootstrap_changepoint_distribution(&s.0, &cfg, &cfg.stream()).map_err(engine)?;
        fill(out, capacity, dist.values())
    })
}

/// Percentile interval of an arbitrary sample.
///
/// # Safety
/// `values` must point at `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_percentile_interval(
    values: *const f64,
    len: usize,
    alpha_ci: f64,
    out: *mut CpbInterval,
) -> CpbStatus {
    guard(|| {
        let values = unsafe { slice_arg(values, len, "values")? };
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let dist = BootstrapDistribution::from_values(values.to_vec()).map_err(engine)?;
        let ci = cpboot::percentile_interval(&dist, alpha_ci).map_err(engine)?;
        // SAFETY: checked non-null above.
        unsafe {
            *out = CpbInterval {
                lower: ci.lower,
                upper: ci.upper,
                length: ci.length,
                level: ci.level,
            }
        };
        Ok(())
    })
}

/// Interval lengths from `cfg->r_outer` bootstrap distributions; `out`
/// needs `cfg->r_outer` slots.
///
/// # Safety
/// `series` and `cfg` must be valid; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cpb_lambda_distribution(
    series: *const CpbSeries,
    cfg: *const CpbBootstrapConfig,
    out: *mut f64,
    capacity: usize,
) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        let cfg: BootstrapConfig = unsafe { ref_arg(cfg, "cfg")? }.into();
        let lambdas = cpboot::lambda_distribution(&s.0, &cfg, &cfg.stream()).map_err(engine)?;
        fill(out, capacity, &lambdas)
    })
}

/// Demeaned no-changepoint series.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_demean_null(series: *const CpbSeries, min_segment: usize, out: *mut *mut CpbSeries) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        let x = cpboot::demean_null(&s.0, min_segment).map_err(engine)?;
        store(out, CpbSeries(x))
    })
}

/// Permutation no-changepoint series.
///
/// # Safety
/// `series` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_permute_null(series: *const CpbSeries, seed: u64, out: *mut *mut CpbSeries) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        let x = cpboot::permute_null(&s.0, &RngStream::new(seed));
        store(out, CpbSeries(x))
    })
}

/// Run the interval-length test with the seed in `cfg->bootstrap.seed`.
///
/// # Safety
/// `series` and `cfg` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_ci_length_test(
    series: *const CpbSeries,
    cfg: *const CpbTestConfig,
    out: *mut *mut CpbTestReport,
) -> CpbStatus {
    guard(|| {
        let s = unsafe { ref_arg(series, "series")? };
        let cfg: TestConfig = unsafe { ref_arg(cfg, "cfg")? }.into();
        let report = cpboot::ci_length_test(&s.0, &cfg, &RngStream::new(cfg.bootstrap.seed)).map_err(engine)?;
        store(out, CpbTestReport(report))
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_test_report_summary(report: *const CpbTestReport, out: *mut CpbTestSummary) -> CpbStatus {
    guard(|| {
        let r = &unsafe { ref_arg(report, "report")? }.0;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let summary = CpbTestSummary {
            c_hat: r.c_hat,
            t_star: r.t_star,
            lambda1_point: r.lambda1_point,
            reject: r.reject,
            q_hat: r.q_hat.unwrap_or(f64::NAN),
            power: r.power,
            n_samples: r.lambda1_samples.len(),
        };
        // SAFETY: checked non-null above.
        unsafe { *out = summary };
        Ok(())
    })
}

/// Copy the observed-series (λ1) interval lengths.
///
/// # Safety
/// `report` must be a live handle; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cpb_test_report_lambda1(report: *const CpbTestReport, out: *mut f64, capacity: usize) -> CpbStatus {
    guard(|| fill(out, capacity, &unsafe { ref_arg(report, "report")? }.0.lambda1_samples))
}

/// Copy the null-series (λ0) interval lengths.
///
/// # Safety
/// `report` must be a live handle; `out` must hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cpb_test_report_lambda0(report: *const CpbTestReport, out: *mut f64, capacity: usize) -> CpbStatus {
    guard(|| fill(out, capacity, &unsafe { ref_arg(report, "report")? }.0.lambda0_samples))
}

/// The report as JSON (17 significant digits); release with [`cpb_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cpb_test_report_json(report: *const CpbTestReport, out: *mut *mut c_char) -> CpbStatus {
    guard(|| {
        let r = &unsafe { ref_arg(report, "report")? }.0;
        if out.is_null() {
            return Err(null_arg("out"));
        }
        let json = cpboot::report::to_json(r);
        let s = CString::new(json).map_err(|e| (CpbStatus::InvalidInput, e.to_string()))?;
        // SAFETY: checked non-null above.
        unsafe { *out = s.into_raw() };
        Ok(())
    })
}

/// # Safety
/// `report` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpb_test_report_free(report: *mut CpbTestReport) {
    if !report.is_null() {
        // SAFETY: handle was produced by `Box::into_raw`.
        drop(unsafe { Box::from_raw(report) });
    }
}

/// Power at each effect size (multiples of `sigma`) on synthetic series of
/// length `n` with the changepoint at `n / 2`. `out` needs `grid_len` slots.
///
/// # Safety
/// `grid` must point at `grid_len` doubles; `cfg` must be valid; `out` must
/// hold `capacity` doubles.
#[no_mangle]
pub unsafe extern "C" fn cpb_power_curve(
    grid: *const f64,
    grid_len: usize,
    n: usize,
    sigma: f64,
    repeats: usize,
    cfg: *const CpbTestConfig,
    out: *mut f64,
    capacity: usize,
) -> CpbStatus {
    guard(|| {
        let grid = unsafe { slice_arg(grid, grid_len, "grid")? };
        let cfg: TestConfig = unsafe { ref_arg(cfg, "cfg")? }.into();
        let settings = CurveSettings {
            repeats,
            ..CurveSettings::new(n, sigma)
        };
        let curve = cpboot::power_curve(grid, &settings, &cfg, &RngStream::new(cfg.bootstrap.seed)).map_err(engine)?;
        fill(out, capacity, &curve.power)
    })
}
