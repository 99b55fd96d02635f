//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured values (run with `--nocapture` to see
//! them; the per-test ok/FAILED lines double as the pass/fail report).
//!
//! The final criterion reproduces published statistics of the original
//! 2003 printing trace and only runs when `HEAVYTAIL_DATASET` points at
//! that trace in the canonical CSV format; it is `#[ignore]`d otherwise.

mod common;

use std::time::Instant;

use heavytail::distributions::{
    busiest_user, collapse_score, event_rate, log_binned_density, per_user_intervals,
    rescale_density, size_ccdf, thresholded_intervals, user_intervals, IntervalSet, IntervalSource,
    DEFAULT_BIN_RATIO, DEFAULT_MIN_BIN_COUNT, DEFAULT_T_MIN,
};
use heavytail::estimators::{fit_lognormal, fit_q_exponential, fit_slope, DEFAULT_USER_FIT_RANGE};
use heavytail::generator::{
    pareto_mean, simulate, simulate_arrivals, GeneratorConfig, SizeModel, TruncatedPareto,
    SECONDS_PER_YEAR,
};
use heavytail::ingest::EventLog;
use heavytail::signal::{
    autocorrelation, counts_per_second, power_spectrum, segment_periodogram, shuffle_intervals,
    DEFAULT_SEGMENT_LENGTH, DEFAULT_SPECTRAL_FIT_BAND,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAPER_K: f64 = 0.3;
const PAPER_A: f64 = 2.5;
const PAPER_B: f64 = 2.524e8;
const PAPER_SIZES: SizeModel = SizeModel {
    s_star: 7.9e5,
    gamma_minus_1: 0.76,
};

/// The pinned one-year run at the published parameters (1000 streams,
/// five-year warm-up) used by criteria 2-5.
fn paper_run_config() -> GeneratorConfig {
    GeneratorConfig {
        n_streams: 1000,
        tail_exponent: PAPER_K,
        lower_cutoff: PAPER_A,
        upper_cutoff: PAPER_B,
        warmup: 5.0 * SECONDS_PER_YEAR,
        horizon: SECONDS_PER_YEAR,
        seed: 6,
        size_model: Some(PAPER_SIZES),
    }
}

#[test]
fn criterion_1_sampler_correctness() {
    let start = Instant::now();
    let dist = TruncatedPareto::new(PAPER_K, PAPER_A, PAPER_B).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 1_000_000;
    let mut draws: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    let sample_mean = draws.iter().sum::<f64>() / n as f64;
    draws.sort_by(f64::total_cmp);
    let ks = common::ks_distance(&draws, |x| dist.cdf(x));

    let analytic_mean = pareto_mean(PAPER_K, PAPER_A, PAPER_B).unwrap();
    assert!(ks < 0.003, "KS distance {ks} >= 0.003");
    assert!(
        (sample_mean / analytic_mean - 1.0).abs() < 0.10,
        "sample mean {sample_mean} vs analytic {analytic_mean}"
    );
    assert!(
        (analytic_mean / 4.33e5 - 1.0).abs() < 0.01,
        "analytic mean {analytic_mean} should be about 4.33e5 s"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "took {elapsed:?}, budget 10 s"
    );
    println!(
        "criterion 1 (sampler correctness): PASS - KS {ks:.5} < 0.003, \
         sample mean {sample_mean:.4e} vs analytic {analytic_mean:.4e}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_2_generator_volume() {
    let start = Instant::now();
    let config = paper_run_config();
    let log = simulate(&config).unwrap();
    let count = log.len() as f64;

    let expected =
        config.horizon / pareto_mean(PAPER_K, PAPER_A, PAPER_B).unwrap() * config.n_streams as f64;
    assert!(
        (count - 73_000.0).abs() <= 5_000.0,
        "simulated {count} events, outside 73000 +- 5000"
    );
    assert!(
        (expected - 73_000.0).abs() <= 5_000.0,
        "analytic expectation {expected} outside 73000 +- 5000"
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "took {elapsed:?}, budget 1 min"
    );
    println!(
        "criterion 2 (generator volume): PASS - {count} events \
         (analytic expectation {expected:.0}), {elapsed:.2?}"
    );
}

#[test]
fn criterion_3_implied_rate() {
    let config = paper_run_config();
    let log = simulate(&config).unwrap();
    let entry = event_rate(&log, 0).unwrap();
    let minutes = entry.mean_interval / 60.0;
    assert!(
        (minutes / 7.1 - 1.0).abs() < 0.10,
        "mean interval {minutes} min, outside 7.1 min +- 10%"
    );
    println!(
        "criterion 3 (implied rate): PASS - <t>_0 = {:.1} s = {minutes:.2} min \
         over N(>0) = {}",
        entry.mean_interval, entry.n_gt
    );
}

#[test]
fn criterion_4_simulation_spectrum_slope() {
    let start = Instant::now();
    let config = paper_run_config();
    let log = simulate(&config).unwrap();
    let series = counts_per_second(&log).unwrap();
    let spectrum = power_spectrum(&series, DEFAULT_SEGMENT_LENGTH, 10).unwrap();
    let fit = fit_slope(&spectrum.points(), DEFAULT_SPECTRAL_FIT_BAND).unwrap();
    assert!(
        (fit.exponent - 0.3).abs() <= 0.1,
        "spectral slope {} outside 0.3 +- 0.1",
        fit.exponent
    );
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 120.0,
        "took {elapsed:?}, budget 2 min"
    );
    println!(
        "criterion 4 (simulation spectrum slope): PASS - alpha {:.3} +- {:.3} \
         over [{:.0e}, {:.0e}] Hz, {} segments, {elapsed:.2?}",
        fit.exponent,
        fit.std_error,
        DEFAULT_SPECTRAL_FIT_BAND.0,
        DEFAULT_SPECTRAL_FIT_BAND.1,
        spectrum.n_segments
    );
}

#[test]
fn criterion_5_collapse_on_simulated_trace() {
    let start = Instant::now();
    let config = paper_run_config();
    let log = simulate(&config).unwrap();

    let thresholds = [0u64, 10_000, 100_000, 1_000_000];
    let curves: Vec<_> = thresholds
        .iter()
        .map(|&threshold| {
            let set = thresholded_intervals(&log, threshold).unwrap();
            let rate = event_rate(&log, threshold).unwrap().rate;
            let density = log_binned_density(&set, DEFAULT_BIN_RATIO, DEFAULT_T_MIN).unwrap();
            rescale_density(&density, rate)
        })
        .collect();
    let score = collapse_score(&curves, DEFAULT_MIN_BIN_COUNT).unwrap();
    assert!(score < 0.25, "collapse score {score} >= 0.25");
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "took {elapsed:?}, budget 1 min"
    );
    println!(
        "criterion 5 (collapse on simulated trace): PASS - score {score:.3} \
         over thresholds {thresholds:?}, {elapsed:.2?}"
    );
}

#[test]
fn criterion_6_estimator_recovery() {
    let start = Instant::now();

    // q-exponential: parameters back from 1e5 sampler draws.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let events: Vec<_> = (0..100_000)
        .map(|i| heavytail::ingest::PrintEvent {
            timestamp: i as u64,
            user: "u".to_string(),
            size: heavytail::generator::sample_q_exponential_size(
                1.0 - rng.random::<f64>(),
                &PAPER_SIZES,
            )
            .unwrap(),
            printer: "x".to_string(),
        })
        .collect();
    let ccdf = size_ccdf(&EventLog::from_events(events));
    let qexp = fit_q_exponential(&ccdf).unwrap();
    assert!(
        (qexp.s_star / PAPER_SIZES.s_star - 1.0).abs() < 0.10,
        "s_star {} vs {}",
        qexp.s_star,
        PAPER_SIZES.s_star
    );
    assert!(
        (qexp.gamma_minus_1 / PAPER_SIZES.gamma_minus_1 - 1.0).abs() < 0.05,
        "gamma_minus_1 {} vs {}",
        qexp.gamma_minus_1,
        PAPER_SIZES.gamma_minus_1
    );

    // Log-normal: (m, sigma) back from 1e6 draws within 3 standard errors.
    let (m, sigma) = (-3.41, 2.16);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples = IntervalSet {
        intervals: (0..1_000_000)
            .map(|_| {
                let u1: f64 = 1.0 - rng.random::<f64>();
                let u2: f64 = rng.random();
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                (m + sigma * z).exp()
            })
            .collect(),
        source: IntervalSource::Simulated,
        n_dropped_zero: 0,
    };
    let lognormal = fit_lognormal(&samples).unwrap();
    assert!(
        (lognormal.m - m).abs() < 3.0 * lognormal.std_errors.m,
        "m {} vs {m} (se {})",
        lognormal.m,
        lognormal.std_errors.m
    );
    assert!(
        (lognormal.sigma - sigma).abs() < 3.0 * lognormal.std_errors.sigma,
        "sigma {} vs {sigma} (se {})",
        lognormal.sigma,
        lognormal.std_errors.sigma
    );

    // Slopes: exact power laws recovered to 1e-10.
    for alpha in [1.3, 0.5] {
        let points: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let x = 10f64.powf(i as f64 / 4.0);
                (x, x.powf(-alpha))
            })
            .collect();
        let fit = fit_slope(&points, (points[0].0, points[19].0)).unwrap();
        assert!(
            (fit.exponent - alpha).abs() < 1e-10,
            "slope {} vs {alpha}",
            fit.exponent
        );
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "took {elapsed:?}, budget 30 s"
    );
    println!(
        "criterion 6 (estimator recovery): PASS - s_star {:.3e}, gamma_minus_1 {:.3}, \
         m {:.4}, sigma {:.4}, slopes exact, {elapsed:.2?}",
        qexp.s_star, qexp.gamma_minus_1, lognormal.m, lognormal.sigma
    );
}

/// Shuffled-sequence noise band: |a(tau)| < 3 a(0) / sqrt(n) at >= 95%
/// of lags 1..=1000.
fn shuffled_band_fraction(set: &IntervalSet, shuffle_seed: u64) -> f64 {
    let tau_max = 1000;
    let shuffled = shuffle_intervals(set, shuffle_seed);
    let ac = autocorrelation(&shuffled, tau_max).unwrap();
    let band = 3.0 * ac.values[0] / (set.len() as f64).sqrt();
    let inside = ac.values[1..].iter().filter(|v| v.abs() < band).count();
    inside as f64 / tau_max as f64
}

#[test]
fn criterion_7_shuffle_control() {
    let start = Instant::now();

    // Constructed long-range-dependent sequence: exponentiated 1/f
    // Gaussian series, positive by construction.
    let n = 1 << 15;
    let base = common::synthesize_power_law_series(n, 1.0, 4);
    let scale = (n as f64).sqrt() / base.iter().map(|&x| x * x).sum::<f64>().sqrt();
    let constructed = IntervalSet {
        intervals: base.iter().map(|&x| (x * scale).exp()).collect(),
        source: IntervalSource::Simulated,
        n_dropped_zero: 0,
    };
    let constructed_fraction = shuffled_band_fraction(&constructed, 99);
    assert!(
        constructed_fraction >= 0.95,
        "constructed sequence: only {constructed_fraction:.3} of lags in band"
    );

    // A simulated stream: single truncated-Pareto renewal stream with
    // enough arrivals to probe 1000 lags.
    let config = GeneratorConfig {
        n_streams: 1,
        tail_exponent: PAPER_K,
        lower_cutoff: PAPER_A,
        upper_cutoff: PAPER_B,
        warmup: 5.0 * SECONDS_PER_YEAR,
        horizon: 30.0 * SECONDS_PER_YEAR,
        seed: 2,
        size_model: None,
    };
    let arrivals = simulate_arrivals(&config).unwrap();
    let stream = IntervalSet {
        intervals: arrivals.windows(2).map(|w| w[1].time - w[0].time).collect(),
        source: IntervalSource::Simulated,
        n_dropped_zero: 0,
    };
    assert!(stream.len() > 1000, "stream has {} intervals", stream.len());
    let stream_fraction = shuffled_band_fraction(&stream, 17);
    assert!(
        stream_fraction >= 0.95,
        "simulated stream: only {stream_fraction:.3} of lags in band"
    );

    let elapsed = start.elapsed();
    println!(
        "criterion 7 (shuffle control): PASS - band fractions {constructed_fraction:.3} \
         (constructed LRD, n = {n}) and {stream_fraction:.3} (simulated stream, n = {}), {elapsed:.2?}",
        stream.len()
    );
}

#[test]
fn criterion_8_normalization_and_identities() {
    let config = GeneratorConfig {
        n_streams: 40,
        tail_exponent: PAPER_K,
        lower_cutoff: PAPER_A,
        upper_cutoff: 1e5,
        warmup: 1e4,
        horizon: 1e6,
        seed: 3,
        size_model: Some(PAPER_SIZES),
    };
    let log = simulate(&config).unwrap();

    // Every log-binned density integrates to 1 +- 1e-9.
    let mut densities_checked = 0;
    for threshold in [0u64, 10_000, 1_000_000] {
        let set = thresholded_intervals(&log, threshold).unwrap();
        let density = log_binned_density(&set, DEFAULT_BIN_RATIO, DEFAULT_T_MIN).unwrap();
        assert!(
            (density.integral() - 1.0).abs() < 1e-9,
            "threshold {threshold}: integral {}",
            density.integral()
        );
        let rate = event_rate(&log, threshold).unwrap().rate;
        let rescaled = rescale_density(&density, rate);
        assert!((rescaled.integral() - 1.0).abs() < 1e-9);
        densities_checked += 2;
    }
    let per_user = per_user_intervals(&log, 4).unwrap();
    let density = log_binned_density(&per_user, DEFAULT_BIN_RATIO, DEFAULT_T_MIN).unwrap();
    assert!((density.integral() - 1.0).abs() < 1e-9);
    densities_checked += 1;

    // a(0) equals the biased variance to 1e-9 (relative on the
    // dimensionless rescaled set).
    let rate = event_rate(&log, 0).unwrap().rate;
    let rescaled_set = thresholded_intervals(&log, 0).unwrap().scaled_by(rate);
    let n = rescaled_set.len() as f64;
    let mean = rescaled_set.intervals.iter().sum::<f64>() / n;
    let variance = rescaled_set
        .intervals
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<f64>()
        / n;
    let ac = autocorrelation(&rescaled_set, 10).unwrap();
    assert!(
        (ac.values[0] - variance).abs() < 1e-9 * variance.max(1.0),
        "a(0) {} vs biased variance {variance}",
        ac.values[0]
    );

    // Parseval per segment to 1e-6 relative.
    let series = counts_per_second(&log).unwrap();
    let segment: Vec<f64> = series.counts[..4096].iter().map(|&c| c as f64).collect();
    let seg_n = segment.len() as f64;
    let seg_mean = segment.iter().sum::<f64>() / seg_n;
    let seg_variance = segment
        .iter()
        .map(|&x| (x - seg_mean) * (x - seg_mean))
        .sum::<f64>()
        / seg_n;
    let total: f64 = segment_periodogram(&segment).iter().sum();
    let expected = seg_variance * seg_n;
    assert!(
        (total - expected).abs() < 1e-6 * expected,
        "Parseval: {total} vs {expected}"
    );

    println!(
        "criterion 8 (normalization and identities): PASS - {densities_checked} densities \
         at 1e-9, a(0) = biased variance at 1e-9, Parseval at 1e-6"
    );
}

/// Reproduction of the published 2003 statistics. Provide the original
/// trace in canonical CSV form via HEAVYTAIL_DATASET to run it.
#[test]
#[ignore = "conditional on dataset availability: set HEAVYTAIL_DATASET to the 2003 trace CSV"]
fn criterion_9_real_dataset_reproduction() {
    let path = std::env::var("HEAVYTAIL_DATASET")
        .expect("HEAVYTAIL_DATASET must point at the 2003 trace in canonical CSV format");
    let bytes = std::fs::read(&path).expect("dataset should be readable");
    let log = heavytail::ingest::parse_log(bytes.as_slice()).expect("dataset should parse");

    // Table-1 values, exact.
    let summary = heavytail::ingest::summarize(&log).unwrap();
    assert_eq!(summary.n_requests, 73_853);
    assert_eq!(summary.n_users, 1_122);
    assert_eq!(summary.n_users_gt3, 1_001);
    assert!(
        (summary.mean_size / 1.2e6 - 1.0).abs() < 0.05,
        "mean size {}",
        summary.mean_size
    );
    assert!(
        (summary.mean_interval / (7.1 * 60.0) - 1.0).abs() < 0.05,
        "mean interval {}",
        summary.mean_interval
    );

    // Size CCDF fit within the published errors.
    let qexp = fit_q_exponential(&size_ccdf(&log)).unwrap();
    assert!(
        (qexp.s_star - 7.9e5).abs() < 0.5e5,
        "s_star {}",
        qexp.s_star
    );
    assert!(
        (qexp.gamma_minus_1 - 0.76).abs() < 0.03,
        "gamma_minus_1 {}",
        qexp.gamma_minus_1
    );

    // Pooled rescaled intervals close to the published log-normal.
    let thresholds = [0u64, 10_000, 100_000, 1_000_000];
    let mut pooled = Vec::new();
    for &threshold in &thresholds {
        let set = thresholded_intervals(&log, threshold).unwrap();
        let rate = event_rate(&log, threshold).unwrap().rate;
        pooled.extend(set.scaled_by(rate).intervals);
    }
    let lognormal = fit_lognormal(&IntervalSet {
        intervals: pooled,
        source: IntervalSource::ConcatenatedUsers,
        n_dropped_zero: 0,
    })
    .unwrap();
    assert!((lognormal.m - -3.41).abs() < 0.07 + 3.0 * lognormal.std_errors.m);
    assert!((lognormal.sigma - 2.16).abs() < 0.04 + 3.0 * lognormal.std_errors.sigma);

    // Pooled per-user interval density: power law with alpha 1.3 +- 0.15
    // between one minute and one day.
    let per_user = per_user_intervals(&log, 4).unwrap();
    let density = log_binned_density(&per_user, DEFAULT_BIN_RATIO, DEFAULT_T_MIN).unwrap();
    let points: Vec<(f64, f64)> = (0..density.n_bins())
        .filter(|&j| density.counts[j] >= DEFAULT_MIN_BIN_COUNT)
        .map(|j| (density.bin_center(j), density.densities[j]))
        .collect();
    let user_slope = fit_slope(&points, DEFAULT_USER_FIT_RANGE).unwrap();
    assert!(
        (user_slope.exponent - 1.3).abs() <= 0.15,
        "per-user slope {}",
        user_slope.exponent
    );

    // Busiest-user autocorrelation decays with exponent 0.6 +- 0.2.
    let (user, _) = busiest_user(&log).unwrap();
    let set = user_intervals(&log, &user).unwrap();
    let ac = autocorrelation(&set, 1000.min(set.len() - 1)).unwrap();
    let ac_points: Vec<(f64, f64)> = ac
        .iter()
        .skip(1)
        .map(|(lag, value)| (lag as f64, value))
        .collect();
    let ac_slope = fit_slope(&ac_points, (1.0, 100.0)).unwrap();
    assert!(
        (ac_slope.exponent - 0.6).abs() <= 0.2,
        "autocorrelation slope {}",
        ac_slope.exponent
    );

    // Spectral slope 0.5 +- 0.15 over the documented band.
    let series = counts_per_second(&log).unwrap();
    let spectrum = power_spectrum(&series, DEFAULT_SEGMENT_LENGTH, 10).unwrap();
    let fit = fit_slope(&spectrum.points(), DEFAULT_SPECTRAL_FIT_BAND).unwrap();
    assert!(
        (fit.exponent - 0.5).abs() <= 0.15,
        "real spectral slope {}",
        fit.exponent
    );

    println!(
        "criterion 9 (real dataset): PASS - Table-1 exact, S* {:.3e}, gamma-1 {:.3}, \
         lognormal ({:.3}, {:.3}), user slope {:.3}, autocorr slope {:.3}, spectral slope {:.3}",
        qexp.s_star,
        qexp.gamma_minus_1,
        lognormal.m,
        lognormal.sigma,
        user_slope.exponent,
        ac_slope.exponent,
        fit.exponent
    );
}
