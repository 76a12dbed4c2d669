// SPDX-License-Identifier: MIT OR Apache-2.0

#![allow(dead_code)]

use std::f64::consts::PI;

use cpboot::TimeSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Closed-form OLS line plus MLE variance for one segment, written without
/// any running sums so it shares no code or algebra with the library scan.
pub struct NaiveFit {
    pub beta0: f64,
    pub beta1: f64,
    pub rss: f64,
    pub m: usize,
}

pub fn naive_fit(t: &[f64], y: &[f64]) -> NaiveFit {
    let m = t.len();
    let mf = m as f64;
    let st: f64 = t.iter().sum();
    let sy: f64 = y.iter().sum();
    let stt: f64 = t.iter().map(|v| v * v).sum();
    let sty: f64 = t.iter().zip(y).map(|(a, b)| a * b).sum();
    let det = mf * stt - st * st;
    let (beta0, beta1) = if det.abs() <= 1e-12 * mf * stt.max(1.0) {
        (sy / mf, 0.0)
    } else {
        let beta1 = (mf * sty - st * sy) / det;
        ((sy - beta1 * st) / mf, beta1)
    };
    let rss = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| {
            let r = yi - beta0 - beta1 * ti;
            r * r
        })
        .sum();
    NaiveFit { beta0, beta1, rss, m }
}

pub fn naive_floor(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    1e-12_f64.max(1e-12 * var)
}

pub fn naive_loglik(fit: &NaiveFit, floor: f64) -> f64 {
    let s2 = (fit.rss / fit.m as f64).max(floor);
    -(fit.m as f64) / 2.0 * ((2.0 * PI * s2).ln() + 1.0)
}

/// Statistic at every split `k in min_segment..=n-min_segment` of a series
/// with strictly increasing `t`, plus the first maximising `k`.
pub fn naive_scan(t: &[f64], y: &[f64], min_segment: usize) -> (Vec<f64>, usize) {
    let n = t.len();
    let floor = naive_floor(y);
    let full = naive_loglik(&naive_fit(t, y), floor);
    let stats: Vec<f64> = (min_segment..=n - min_segment)
        .map(|k| {
            naive_loglik(&naive_fit(&t[..k], &y[..k]), floor)
                + naive_loglik(&naive_fit(&t[k..], &y[k..]), floor)
                - full
        })
        .collect();
    let mut best = 0;
    for (i, &s) in stats.iter().enumerate() {
        if s > stats[best] {
            best = i;
        }
    }
    (stats, best + min_segment)
}

/// Random series with `n` in `10..=50`, strictly increasing irregular times,
/// a random linear mean that may break once, and Gaussian noise.
pub fn random_series(rng: &mut ChaCha8Rng) -> TimeSeries {
    let n = rng.random_range(10..=50);
    let mut t = Vec::with_capacity(n);
    let mut now = rng.random_range(-20.0..20.0);
    for _ in 0..n {
        now += rng.random_range(0.1..2.0);
        t.push(now);
    }
    let brk = rng.random_range(3..n - 2);
    let (a0, a1) = (rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0));
    let (b0, b1) = (rng.random_range(-5.0..5.0), rng.random_range(-1.0..1.0));
    let noise = Normal::new(0.0, rng.random_range(0.1..3.0)).unwrap();
    let y = t
        .iter()
        .enumerate()
        .map(|(i, &ti)| {
            let mean = if i < brk { a0 + a1 * ti } else { b0 + b1 * ti };
            mean + noise.sample(rng)
        })
        .collect();
    TimeSeries::new(t, y).unwrap()
}

pub fn random_corpus(seed: u64, count: usize) -> Vec<TimeSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_series(&mut rng)).collect()
}

/// Indexed series: `left` copies of `a` followed by `right` copies of `b`.
pub fn step(left: usize, right: usize, a: f64, b: f64) -> TimeSeries {
    let y = std::iter::repeat_n(a, left).chain(std::iter::repeat_n(b, right)).collect();
    TimeSeries::indexed(y).unwrap()
}

/// Indexed i.i.d. normal noise.
pub fn noise(n: usize, sigma: f64, seed: u64) -> TimeSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = Normal::new(0.0, sigma).unwrap();
    TimeSeries::indexed((0..n).map(|_| d.sample(&mut rng)).collect()).unwrap()
}

/// Statistic vector of a scan, inadmissible splits dropped.
pub fn stats_of(scan: &cpboot::ScanResult) -> Vec<(usize, f64)> {
    scan.admissible().collect()
}
