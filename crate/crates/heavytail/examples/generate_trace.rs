//! Generate a synthetic request trace from N truncated-Pareto renewal
//! streams and write it in the canonical CSV format.
//!
//! ```bash
//! cargo run --release -p heavytail --example generate_trace
//! ```

use heavytail::generator::{pareto_mean, simulate, GeneratorConfig, SizeModel, SECONDS_PER_YEAR};
use heavytail::ingest::write_log;

fn main() {
    // A scaled-down cousin of the published setup (1000 streams, eight-
    // year upper cutoff, five-year warm-up) so the example runs in
    // seconds: 200 streams, ~12-day upper cutoff, one-month horizon.
    let config = GeneratorConfig {
        n_streams: 200,
        tail_exponent: 0.3,
        lower_cutoff: 2.5,
        upper_cutoff: 1e6,
        warmup: 0.1 * SECONDS_PER_YEAR,
        horizon: SECONDS_PER_YEAR / 12.0,
        seed: 42,
        size_model: Some(SizeModel {
            s_star: 7.9e5,
            gamma_minus_1: 0.76,
        }),
    };

    let log = simulate(&config).expect("valid config");

    let mean_interval = pareto_mean(
        config.tail_exponent,
        config.lower_cutoff,
        config.upper_cutoff,
    )
    .unwrap();
    let expected = config.horizon / mean_interval * config.n_streams as f64;
    println!("streams:            {}", config.n_streams);
    println!("per-stream mean gap: {mean_interval:.0} s");
    println!("expected events:    {expected:.0}");
    println!("simulated events:   {}", log.len());
    println!("trace span:         {} s", log.span());

    let path = std::env::temp_dir().join("heavytail-example-trace.csv");
    let file = std::fs::File::create(&path).expect("temp dir is writable");
    write_log(&log, std::io::BufWriter::new(file)).expect("write trace");
    println!("wrote {}", path.display());
    println!("(rerunning with the same seed reproduces the file byte for byte)");
}
