//! Fit the q-exponential (modified power law) to a size CCDF:
//! `N(>S) ~ (1 + S/S*)^{-(gamma-1)}`, flat below the crossover scale S*
//! and a power law above it. Demonstrates parameter recovery from
//! synthetic sizes and the bootstrap error option.
//!
//! ```bash
//! cargo run --release -p heavytail --example fit_size_distribution
//! ```

use heavytail::distributions::size_ccdf;
use heavytail::estimators::{
    fit_q_exponential, fit_q_exponential_with, BootstrapOptions, QExpFitOptions,
};
use heavytail::generator::{sample_q_exponential_size, SizeModel};
use heavytail::ingest::{EventLog, PrintEvent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let model = SizeModel {
        s_star: 7.9e5,
        gamma_minus_1: 0.76,
    };
    let n = 100_000;
    println!(
        "sampling {n} sizes with S* = {:.2e}, gamma-1 = {}",
        model.s_star, model.gamma_minus_1
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let events: Vec<PrintEvent> = (0..n)
        .map(|i| PrintEvent {
            timestamp: i as u64,
            user: "u".to_string(),
            size: sample_q_exponential_size(1.0 - rng.random::<f64>(), &model).unwrap(),
            printer: "sampler".to_string(),
        })
        .collect();
    let ccdf = size_ccdf(&EventLog::from_events(events));
    println!(
        "CCDF has {} distinct sizes, {} events above 0 bytes\n",
        ccdf.points.len(),
        ccdf.total
    );

    let fit = fit_q_exponential(&ccdf).unwrap();
    println!("least-squares fit over log-spaced CCDF points:");
    println!(
        "  S*       = {:.4e} +- {:.1e}   (true {:.4e})",
        fit.s_star, fit.std_errors.s_star, model.s_star
    );
    println!(
        "  gamma-1  = {:.4} +- {:.4}      (true {})",
        fit.gamma_minus_1, fit.std_errors.gamma_minus_1, model.gamma_minus_1
    );
    println!(
        "  prefactor {:.4e}, mean squared log residual {:.2e}, {} points",
        fit.prefactor, fit.residual, fit.n_points
    );

    let boot = fit_q_exponential_with(
        &ccdf,
        &QExpFitOptions {
            bootstrap: Some(BootstrapOptions {
                replicates: 200,
                seed: 1,
            }),
            ..QExpFitOptions::default()
        },
    )
    .unwrap();
    println!("\nbootstrap standard errors (200 seeded replicates):");
    println!("  S*      +- {:.1e}", boot.std_errors.s_star);
    println!("  gamma-1 +- {:.4}", boot.std_errors.gamma_minus_1);
}
