//! Shared helpers for unit tests. Oracles here are independent of the
//! implementation paths they check.

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// `sorted` (ascending) and a reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}

/// Composite trapezoid rule on [lo, hi] with `n` panels.
pub fn trapezoid_quadrature<F: Fn(f64) -> f64>(lo: f64, hi: f64, n: usize, f: F) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut sum = 0.5 * (f(lo) + f(hi));
    for i in 1..n {
        sum += f(lo + i as f64 * h);
    }
    sum * h
}
