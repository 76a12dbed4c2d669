// SPDX-License-Identifier: MIT OR Apache-2.0

//! Empirical quantiles by linear interpolation between order statistics.

/// Quantile of ascending-sorted `values` at probability `p`.
///
/// With one-based order statistics `v(1) <= ... <= v(B)` and
/// `h = (B - 1) p + 1`, returns `v(⌊h⌋) + (h - ⌊h⌋)(v(⌊h⌋ + 1) - v(⌊h⌋))`.
///
/// Panics if `values` is empty.
pub fn quantile_sorted(values: &[f64], p: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of empty sample");
    let p = p.clamp(0.0, 1.0);
    let h = (values.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    match values.get(lo + 1) {
        Some(next) if frac > 0.0 => values[lo] + frac * (next - values[lo]),
        _ => values[lo],
    }
}

/// Quantile of an unsorted sample.
pub fn quantile(values: &[f64], p: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    quantile_sorted(&sorted, p)
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoints_and_midpoints() {
        let v = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 8.0);
        assert_eq!(quantile_sorted(&v, 0.5), 3.0);
        assert_eq!(quantile_sorted(&[5.0], 0.3), 5.0);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
    }

    proptest! {
        #[test]
        fn sandwich_and_translation(mut v in proptest::collection::vec(-1e3f64..1e3, 1..60),
                                    a in 0.001f64..0.999, shift in -1e3f64..1e3) {
            v.sort_by(f64::total_cmp);
            let lo = quantile_sorted(&v, a / 2.0);
            let mid = quantile_sorted(&v, 0.5);
            let hi = quantile_sorted(&v, 1.0 - a / 2.0);
            prop_assert!(lo <= mid && mid <= hi);
            prop_assert!(v[0] <= lo && hi <= v[v.len() - 1]);
            let shifted: Vec<f64> = v.iter().map(|x| x + shift).collect();
            let len = hi - lo;
            let len_s = quantile_sorted(&shifted, 1.0 - a / 2.0) - quantile_sorted(&shifted, a / 2.0);
            prop_assert!((len - len_s).abs() <= 1e-9 * (1.0 + shift.abs()));
        }
    }
}
