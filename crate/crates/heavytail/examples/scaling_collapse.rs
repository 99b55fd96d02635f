//! Rescale thresholded inter-arrival densities by their rates so they
//! fall on one curve, score the collapse, and fit the common scaling
//! function with a log-normal.
//!
//! ```bash
//! cargo run --release -p heavytail --example scaling_collapse
//! ```

use heavytail::distributions::{
    collapse_report, event_rate, log_binned_density, rescale_density, thresholded_intervals,
    DEFAULT_BIN_RATIO, DEFAULT_MIN_BIN_COUNT, DEFAULT_T_MIN,
};
use heavytail::estimators::fit_lognormal;
use heavytail::generator::{simulate, GeneratorConfig, SizeModel, SECONDS_PER_YEAR};

fn main() {
    // The published setup: 1000 streams, k = 0.3, cutoffs 2.5 s and
    // eight years, five-year warm-up, one recorded year, i.i.d.
    // q-exponential sizes attached.
    let config = GeneratorConfig {
        seed: 6,
        size_model: Some(SizeModel {
            s_star: 7.9e5,
            gamma_minus_1: 0.76,
        }),
        ..GeneratorConfig::default()
    };
    println!(
        "simulating {} streams over {:.0} warm-up + {:.0} recorded years...",
        config.n_streams,
        config.warmup / SECONDS_PER_YEAR,
        config.horizon / SECONDS_PER_YEAR
    );
    let log = simulate(&config).expect("valid config");
    println!("{} events\n", log.len());

    let thresholds = [0u64, 10_000, 100_000, 1_000_000];
    let mut curves = Vec::new();
    let mut pooled = Vec::new();
    for &threshold in &thresholds {
        let set = thresholded_intervals(&log, threshold).expect("enough events");
        let rate = event_rate(&log, threshold).expect("qualifying events").rate;
        let density = log_binned_density(&set, DEFAULT_BIN_RATIO, DEFAULT_T_MIN).unwrap();
        println!(
            "S > {threshold:>7}: {:>6} intervals, R(S) = {rate:.3e} /s",
            set.len()
        );
        curves.push(rescale_density(&density, rate));
        pooled.extend(set.scaled_by(rate).intervals);
    }

    let report = collapse_report(&curves, DEFAULT_MIN_BIN_COUNT).unwrap();
    println!();
    println!(
        "collapse score {:.3} over x in [{:.2e}, {:.2e}] ({} scored bins; 0 = perfect)",
        report.score, report.common_support.0, report.common_support.1, report.n_bins_scored
    );

    let fit = fit_lognormal(&heavytail::distributions::IntervalSet {
        intervals: pooled,
        source: heavytail::distributions::IntervalSource::ConcatenatedUsers,
        n_dropped_zero: 0,
    })
    .unwrap();
    println!(
        "pooled scaling function: log-normal m = {:.3} +- {:.3}, sigma = {:.3} +- {:.3}",
        fit.m, fit.std_errors.m, fit.sigma, fit.std_errors.sigma
    );
}
