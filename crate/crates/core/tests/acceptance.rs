// SPDX-License-Identifier: MIT OR Apache-2.0

//! End-to-end acceptance checks. Each test prints exactly one line,
//! `criterion <id> <name>: PASS|FAIL (<measurements>)`, then asserts.
//!
//! Run with `cargo test -p cpboot --test acceptance -- --nocapture`.

mod common;

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use cpboot::{
    demean_null, estimate_delta, fit_segment, gaussian_loglik, lrt_statistic_at, percentile_interval,
    permute_null, power_curve, scan_changepoint, BootstrapConfig, BootstrapDistribution, CurveSettings,
    NullMethod, RngStream, TestConfig, TimeSeries,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{naive_scan, random_corpus, stats_of};

/// Criteria run one at a time so wall-clock budgets are not shared.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: &str, name: &str, pass: bool, detail: String) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("criterion {id} {name}: {status} ({detail})");
    assert!(pass, "criterion {id} {name} failed: {detail}");
}

fn corpus() -> Vec<TimeSeries> {
    random_corpus(20_240_601, 200)
}

fn config(b_inner: usize, r_outer: usize, seed: u64, null_method: NullMethod) -> TestConfig {
    TestConfig {
        bootstrap: BootstrapConfig { b_inner, r_outer, seed, ..Default::default() },
        alpha_test: 0.05,
        null_method,
    }
}

/// Power at each grid point, averaged over `seeds` independent runs.
fn seed_averaged_power(grid: &[f64], b_inner: usize, r_outer: usize, seeds: u64, method: NullMethod) -> Vec<f64> {
    let settings = CurveSettings::new(100, 1.0);
    let mut total = vec![0.0; grid.len()];
    for seed in 0..seeds {
        let cfg = config(b_inner, r_outer, seed, method);
        let curve = power_curve(grid, &settings, &cfg, &RngStream::new(seed)).unwrap();
        for (acc, p) in total.iter_mut().zip(&curve.power) {
            *acc += p;
        }
    }
    total.iter().map(|p| p / seeds as f64).collect()
}

#[test]
fn criterion_01_oracle_equivalence() {
    let _g = serial();
    let start = Instant::now();
    let (mut worst, mut argmax_mismatch, mut length_mismatch) = (0.0f64, 0, 0);
    for s in corpus() {
        let scan = scan_changepoint(&s, 3).unwrap();
        let (oracle, c_hat) = naive_scan(s.t(), s.y(), 3);
        let got = stats_of(&scan);
        if got.len() != oracle.len() || got.iter().enumerate().any(|(i, (k, _))| *k != i + 3) {
            length_mismatch += 1;
            continue;
        }
        for ((_, v), w) in got.iter().zip(&oracle) {
            worst = worst.max((v - w).abs());
        }
        argmax_mismatch += usize::from(scan.c_hat != c_hat);
    }
    let elapsed = start.elapsed();
    verdict(
        "1",
        "oracle equivalence",
        worst <= 1e-8 && argmax_mismatch == 0 && length_mismatch == 0 && elapsed < Duration::from_secs(10),
        format!(
            "max |diff| {worst:.3e} <= 1e-8, c_hat mismatches {argmax_mismatch}, split-set mismatches {length_mismatch}, {:.2} s < 10 s",
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_02_nesting() {
    let _g = serial();
    let mut lowest = f64::INFINITY;
    let mut checked = 0;
    for s in corpus() {
        let scan = scan_changepoint(&s, 3).unwrap();
        for (k, v) in scan.admissible() {
            lowest = lowest.min(lrt_statistic_at(&s, k, 3).unwrap()).min(v);
            checked += 1;
        }
    }
    verdict(
        "2",
        "nesting",
        lowest >= -1e-8,
        format!("min statistic {lowest:.3e} >= -1e-8 over {checked} splits"),
    );
}

#[test]
fn criterion_03_likelihood_identity() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let series = random_corpus(33, 100);
    let mut worst = 0.0f64;
    for s in &series {
        let len = rng.random_range(3..=s.len());
        let lo = rng.random_range(0..=s.len() - len);
        let hi = lo + len - 1;
        let fit = fit_segment(s, lo, hi, 3).unwrap();
        let direct: f64 = s.t()[lo..=hi]
            .iter()
            .zip(&s.y()[lo..=hi])
            .map(|(&t, &y)| {
                let r = y - fit.mean_at(t);
                -0.5 * (2.0 * std::f64::consts::PI * fit.sigma2_mle).ln() - r * r / (2.0 * fit.sigma2_mle)
            })
            .sum();
        worst = worst.max((gaussian_loglik(&fit) - direct).abs());
    }
    verdict(
        "3",
        "likelihood identity",
        worst <= 1e-9,
        format!("max |loglik - density sum| {worst:.3e} <= 1e-9 on {} segments", series.len()),
    );
}

#[test]
fn criterion_04_affine_and_shift_invariance() {
    let _g = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst, mut argmax_changes, mut cases) = (0.0f64, 0, 0);
    for s in corpus() {
        let base = scan_changepoint(&s, 3).unwrap();
        for a in [-2.0, 0.5, 10.0] {
            let b = rng.random_range(-100.0..100.0);
            let c = rng.random_range(-1000.0..1000.0);
            let y = s.y().iter().map(|v| a * v + b).collect();
            let t = s.t().iter().map(|v| v + c).collect();
            let moved = scan_changepoint(&TimeSeries::new(t, y).unwrap(), 3).unwrap();
            argmax_changes += usize::from(moved.c_hat != base.c_hat);
            for ((_, v0), (_, v1)) in base.admissible().zip(moved.admissible()) {
                worst = worst.max((v0 - v1).abs());
            }
            cases += 1;
        }
    }
    verdict(
        "4",
        "affine and time-shift invariance",
        worst <= 1e-6 && argmax_changes == 0,
        format!("max |diff| {worst:.3e} <= 1e-6, c_hat changes {argmax_changes} of {cases}"),
    );
}

#[test]
fn criterion_05a_null_power_full_preset() {
    let _g = serial();
    let start = Instant::now();
    let demean = seed_averaged_power(&[0.0], 1000, 200, 30, NullMethod::Demean)[0];
    let permute = seed_averaged_power(&[0.0], 1000, 200, 30, NullMethod::Permute)[0];
    let demean_ok = (demean - 0.12).abs() <= 0.07;
    let permute_ok = (permute - 0.02).abs() <= 0.03;
    verdict(
        "5a",
        "zero-effect power, n=100 B=1000 R=200 over 30 seeds",
        demean_ok && permute_ok && demean > permute,
        format!(
            "demean {demean:.4} in 0.12+-0.07: {demean_ok}; permute {permute:.4} in 0.02+-0.03: {permute_ok}; demean > permute: {}; {:.0} s",
            demean > permute,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_05b_null_power_ordering_reduced_preset() {
    let _g = serial();
    let start = Instant::now();
    let demean = seed_averaged_power(&[0.0], 200, 50, 10, NullMethod::Demean)[0];
    let permute = seed_averaged_power(&[0.0], 200, 50, 10, NullMethod::Permute)[0];
    let elapsed = start.elapsed();
    verdict(
        "5b",
        "zero-effect ordering, B=200 R=50 over 10 seeds",
        demean > permute && elapsed < Duration::from_secs(60),
        format!(
            "demean {demean:.4} > permute {permute:.4}: {}; {:.1} s < 60 s",
            demean > permute,
            elapsed.as_secs_f64()
        ),
    );
}

#[test]
fn criterion_06_high_effect_power() {
    let _g = serial();
    let demean = seed_averaged_power(&[2.0, 3.0], 1000, 200, 10, NullMethod::Demean);
    let permute = seed_averaged_power(&[3.0], 1000, 200, 10, NullMethod::Permute)[0];
    verdict(
        "6",
        "high-effect power, n=100 B=1000 R=200 over 10 seeds",
        demean[0] >= 0.9 && demean[1] >= 0.85 && permute >= 0.85,
        format!(
            "demean 2sd {:.4} >= 0.9; demean 3sd {:.4} >= 0.85; permute 3sd {permute:.4} >= 0.85",
            demean[0], demean[1]
        ),
    );
}

#[test]
fn criterion_07_monotone_power() {
    let _g = serial();
    let grid = [0.0, 1.0, 2.0, 3.0];
    let mut ok = true;
    let mut detail = Vec::new();
    for method in [NullMethod::Demean, NullMethod::Permute] {
        let power = seed_averaged_power(&grid, 200, 50, 10, method);
        ok &= power.windows(2).all(|w| w[1] >= w[0] - 0.05);
        let shown: Vec<String> = power.iter().map(|p| format!("{p:.3}")).collect();
        detail.push(format!("{method} [{}]", shown.join(", ")));
    }
    verdict(
        "7",
        "monotone power over {0,1,2,3}, B=200 R=50 over 10 seeds",
        ok,
        format!("{}; tolerance 0.05", detail.join("; ")),
    );
}

#[test]
fn criterion_08_null_construction() {
    let _g = serial();
    let mut worst_ratio = 0.0f64;
    let mut steps = 0;
    for (left, right, a, b, slope) in [
        (10, 10, 0.0, 10.0, 0.0),
        (5, 5, 0.0, 10.0, 0.0),
        (7, 15, -3.0, 2.5, 0.0),
        (12, 6, 100.0, 101.0, 0.0),
        (20, 30, 1e3, -2e3, 0.0),
        (9, 11, 0.0, 4.0, 0.75),
    ] {
        let y: Vec<f64> = (0..left + right)
            .map(|i| slope * (i + 1) as f64 + if i < left { a } else { b })
            .collect();
        let range = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - y.iter().cloned().fold(f64::INFINITY, f64::min);
        let s = TimeSeries::indexed(y).unwrap();
        let c = estimate_delta(&s, 3).unwrap().c_hat;
        let x = demean_null(&s, 3).unwrap();
        let l = fit_segment(&x, 0, c - 1, 3).unwrap();
        let r = fit_segment(&x, c, x.len() - 1, 3).unwrap();
        let worst = x.t().iter().map(|&t| (r.mean_at(t) - l.mean_at(t)).abs()).fold(0.0, f64::max);
        worst_ratio = worst_ratio.max(worst / range);
        steps += 1;
    }

    let mut multiset_ok = true;
    for seed in 0..50 {
        let s = common::noise(1 + seed as usize, 1.0, seed);
        let p = permute_null(&s, &RngStream::new(seed));
        let mut a: Vec<u64> = s.y().iter().map(|v| v.to_bits()).collect();
        let mut b: Vec<u64> = p.y().iter().map(|v| v.to_bits()).collect();
        a.sort_unstable();
        b.sort_unstable();
        multiset_ok &= a == b && p.t() == s.t();
    }
    verdict(
        "8",
        "null construction",
        worst_ratio <= 1e-6 && multiset_ok,
        format!(
            "max |delta_at| / range(y) {worst_ratio:.3e} <= 1e-6 on {steps} zero-noise steps; permutation multiset preserved on 50 series: {multiset_ok}"
        ),
    );
}

#[test]
fn criterion_09_cli_determinism() {
    let _g = serial();
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("series.csv");
    let series = common::noise(60, 1.0, 9);
    let shifted: Vec<f64> = series.y().iter().enumerate().map(|(i, v)| v + if i >= 30 { 1.5 } else { 0.0 }).collect();
    std::fs::write(&input, TimeSeries::indexed(shifted).unwrap().to_csv()).unwrap();
    let input = input.to_str().unwrap().to_string();

    let commands: Vec<(&str, Vec<String>)> = vec![
        ("detect", vec!["detect".into(), input.clone(), "--bootstrap".into(), "300".into(), "--seed".into(), "5".into()]),
        ("test", vec!["test".into(), input.clone(), "--bootstrap".into(), "200".into(), "--outer".into(), "20".into(), "--seed".into(), "5".into()]),
        ("power", vec!["power".into(), "--grid".into(), "0,1.5".into(), "--bootstrap".into(), "100".into(), "--outer".into(), "10".into(), "--repeats".into(), "2".into(), "--seed".into(), "5".into()]),
    ];
    let mut mismatches = Vec::new();
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        for (run, threads) in ["1", "1", "4", "3"].iter().enumerate() {
            let json = dir.path().join(format!("{name}-{run}.json"));
            let table = dir.path().join(format!("{name}-{run}.csv"));
            let out = Command::new(env!("CARGO_BIN_EXE_cpboot"))
                .args(["--threads", threads])
                .args(args)
                .args(["--out", json.to_str().unwrap(), "--csv", table.to_str().unwrap()])
                .output()
                .unwrap();
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            outputs.push((out.stdout, std::fs::read(&json).unwrap(), std::fs::read(&table).unwrap()));
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            mismatches.push(*name);
        }
    }
    verdict(
        "9",
        "determinism across runs and worker counts",
        mismatches.is_empty(),
        format!("detect/test/power stdout, JSON and CSV compared over threads 1,1,4,3; differing: {mismatches:?}"),
    );
}

#[test]
fn criterion_10_percentile_interval() {
    let _g = serial();
    let dist = BootstrapDistribution::from_values((1..=100).map(f64::from).collect()).unwrap();
    let ci = percentile_interval(&dist, 0.05).unwrap();
    let hand_ok = (ci.lower - 3.475).abs() <= 1e-9 && (ci.upper - 97.525).abs() <= 1e-9 && (ci.length - 94.05).abs() <= 1e-9;

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let values: Vec<f64> = (0..rng.random_range(2..500)).map(|_| rng.random_range(0.0..100.0)).collect();
        let shift = rng.random_range(-1e3..1e3);
        let a = percentile_interval(&BootstrapDistribution::from_values(values.clone()).unwrap(), 0.05).unwrap();
        let b = percentile_interval(
            &BootstrapDistribution::from_values(values.iter().map(|v| v + shift).collect()).unwrap(),
            0.05,
        )
        .unwrap();
        worst = worst.max((a.length - b.length).abs());
    }
    verdict(
        "10",
        "percentile interval",
        hand_ok && worst <= 1e-9,
        format!(
            "1..100 at 0.05 gives ({}, {}) length {} vs 94.05 within 1e-9: {hand_ok}; max translation change {worst:.3e} <= 1e-9",
            ci.lower, ci.upper, ci.length
        ),
    );
}
