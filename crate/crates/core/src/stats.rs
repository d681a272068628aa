//! Percentiles and empirical CDFs of per-file user throughput.

use alloc::vec::Vec;

/// 5th, 50th and 95th percentile (cell-edge, median, cell-center).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Percentiles {
    pub p5: f64,
    pub p50: f64,
    pub p95: f64,
}

/// Linear-interpolation percentile of ascending `sorted`, `q` in `[0, 1]`.
pub fn percentile(sorted: &[f64], q: f64) -> Option<f64> {
    let n = sorted.len();
    if n == 0 {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

pub fn sorted(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `None` when there are no samples.
pub fn collect_percentiles(values: impl IntoIterator<Item = f64>) -> Option<Percentiles> {
    let s = sorted(values);
    Some(Percentiles { p5: percentile(&s, 0.05)?, p50: percentile(&s, 0.5)?, p95: percentile(&s, 0.95)? })
}

/// `(value, i / n)` for the i-th smallest value, i = 1..=n.
pub fn empirical_cdf(values: impl IntoIterator<Item = f64>) -> Vec<(f64, f64)> {
    let s = sorted(values);
    let n = s.len() as f64;
    s.into_iter().enumerate().map(|(i, v)| (v, (i + 1) as f64 / n)).collect()
}
