//! Workload characterization and synthetic arrival generation for
//! heavy-tailed request traces.
//!
//! The crate works on timestamped, sized, user-attributed request logs
//! (print servers, web front ends, batch queues) and provides the full
//! pipeline for studying their temporal structure:
//!
//! - [`ingest`]: parse, validate, filter, and summarize traces in a
//!   canonical CSV format.
//! - [`distributions`]: thresholded and per-user inter-arrival interval
//!   sets, log-binned densities, size CCDFs, rates, rescaled (collapsed)
//!   densities, and a collapse-quality score.
//! - [`estimators`]: q-exponential CCDF fits, log-normal fits of the
//!   rescaled interval distribution, and log-log slope fits.
//! - [`signal`]: interval autocorrelation, shuffle controls,
//!   counts-per-second series, and segmented power spectra.
//! - [`generator`]: an N-stream truncated-Pareto renewal simulator with
//!   warm-up handling, seeded determinism, and optional size attachment.
//! - [`cli`]: the batch front end used by the `heavytail` binary.
//!
//! # Quick start
//!
//! ```
//! use heavytail::generator::{GeneratorConfig, SizeModel, simulate};
//! use heavytail::distributions::{thresholded_intervals, log_binned_density};
//!
//! let config = GeneratorConfig {
//!     n_streams: 20,
//!     tail_exponent: 0.3,
//!     lower_cutoff: 2.5,
//!     upper_cutoff: 1e4,
//!     warmup: 1e4,
//!     horizon: 1e5,
//!     seed: 7,
//!     size_model: Some(SizeModel { s_star: 7.9e5, gamma_minus_1: 0.76 }),
//! };
//! let log = simulate(&config).unwrap();
//! let intervals = thresholded_intervals(&log, 0).unwrap();
//! let density = log_binned_density(&intervals, 1.2, 1.0).unwrap();
//! assert!(density.densities.iter().all(|&d| d >= 0.0));
//! ```
//!
//! Runnable examples covering each capability live in `examples/`; the
//! `heavytail` binary wires the same pipeline into reproducible batch
//! runs.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod generator;
pub mod ingest;
pub mod signal;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
