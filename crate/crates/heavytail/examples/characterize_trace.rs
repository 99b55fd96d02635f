//! Summarize a trace and compute its thresholded inter-arrival
//! densities and rate table, the per-size-threshold view behind the
//! `analyze` subcommand.
//!
//! ```bash
//! cargo run --release -p heavytail --example characterize_trace
//! ```

use heavytail::distributions::{
    event_rate, log_binned_density, thresholded_intervals, DEFAULT_BIN_RATIO, DEFAULT_T_MIN,
};
use heavytail::generator::{simulate, GeneratorConfig, SizeModel};
use heavytail::ingest::summarize;

fn main() {
    let config = GeneratorConfig {
        n_streams: 100,
        upper_cutoff: 1e5,
        warmup: 1e5,
        horizon: 2e6,
        seed: 7,
        size_model: Some(SizeModel {
            s_star: 7.9e5,
            gamma_minus_1: 0.76,
        }),
        ..GeneratorConfig::default()
    };
    let log = simulate(&config).expect("valid config");

    let summary = summarize(&log).expect("enough events");
    println!("requests:        {}", summary.n_requests);
    println!("users:           {}", summary.n_users);
    println!("users > 3 reqs:  {}", summary.n_users_gt3);
    println!("mean size:       {:.3e} bytes", summary.mean_size);
    println!("mean interval:   {:.1} s", summary.mean_interval);
    println!("min resolution:  {:.1} s", summary.min_resolution);
    println!();

    println!(
        "{:>10} {:>9} {:>12} {:>12} {:>7}",
        "threshold", "N(>S)", "R(S) [1/s]", "<t>_S [s]", "bins"
    );
    for threshold in [0u64, 10_000, 100_000, 1_000_000] {
        let entry = event_rate(&log, threshold).expect("qualifying events");
        let set = thresholded_intervals(&log, threshold).expect("enough events");
        let density = log_binned_density(&set, DEFAULT_BIN_RATIO, DEFAULT_T_MIN).unwrap();
        println!(
            "{:>10} {:>9} {:>12.4e} {:>12.1} {:>7}",
            threshold,
            entry.n_gt,
            entry.rate,
            entry.mean_interval,
            density.n_bins()
        );
    }
    println!();
    println!("density columns are bin_left,bin_right,bin_center_geometric,count,density");
    println!("in the CSVs emitted by `heavytail analyze`.");
}
