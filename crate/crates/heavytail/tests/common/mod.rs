//! Helpers shared by the integration suites. Oracles here are
//! independent of the library paths they are used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};

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

/// Real series with an approximate 1/f^alpha spectrum, built by
/// inverse-transforming amplitudes k^{-alpha/2} with random phases.
pub fn synthesize_power_law_series(n: usize, alpha: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex::new(0.0, 0.0); n];
    for k in 1..n / 2 {
        let amplitude = (k as f64).powf(-alpha / 2.0);
        let phase = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
        let value = Complex::from_polar(amplitude, phase);
        spectrum[k] = value;
        spectrum[n - k] = value.conj();
    }
    spectrum[n / 2] = Complex::new((n as f64 / 2.0).powf(-alpha / 2.0), 0.0);
    FftPlanner::new().plan_fft_inverse(n).process(&mut spectrum);
    spectrum.iter().map(|c| c.re).collect()
}
