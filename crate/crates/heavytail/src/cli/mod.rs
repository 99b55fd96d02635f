//! Command-line front end: reproducible batch runs that wire ingestion,
//! analysis, fitting, signal processing, and generation into CSV/JSON
//! artifacts on disk.
//!
//! Every command writes a `manifest.json` (last, after all other
//! outputs) recording the command, its resolved parameters, a digest of
//! the input trace, the tool version, and the emitted files. Outputs
//! contain no wall-clock state, so re-running a command with identical
//! inputs, flags, and seed reproduces identical bytes.
//!
//! Exit codes: 0 on success, 1 for malformed input, 2 for statistical
//! insufficiency or invalid parameters.

mod commands;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};

/// What a run produced, written alongside its outputs.
///
/// The manifest lists every emitted file except itself and is written
/// only after all of them exist.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    /// Subcommand name.
    pub command: String,
    /// Resolved parameter values, stringified.
    pub parameters: BTreeMap<String, String>,
    /// `sha256:<hex>` of the input trace bytes; absent for `generate`.
    pub input_digest: Option<String>,
    pub tool_version: String,
    /// Emitted files, relative to the manifest's directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    fn new(command: &str, input_digest: Option<String>) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            input_digest,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: Vec::new(),
        }
    }

    fn set<V: ToString>(&mut self, key: &str, value: V) {
        self.parameters.insert(key.to_string(), value.to_string());
    }

    fn set_optional<V: ToString>(&mut self, key: &str, value: &Option<V>) {
        let rendered = value.as_ref().map_or("none".to_string(), |v| v.to_string());
        self.parameters.insert(key.to_string(), rendered);
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Workload characterization and synthetic arrival generation for heavy-tailed request traces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-threshold interval densities, a rate table, the size CCDF,
    /// and a trace summary.
    Analyze(AnalyzeArgs),
    /// Rescaled (collapsed) interval densities, a collapse score, and a
    /// pooled log-normal fit of the scaling function.
    Collapse(CollapseArgs),
    /// Pooled per-user interval density with a power-law fit, plus
    /// single-user autocorrelation with an optional shuffled control.
    UserStats(UserStatsArgs),
    /// Segmented power spectrum of the counts-per-second series with a
    /// spectral slope fit.
    Spectrum(SpectrumArgs),
    /// Generate a synthetic trace from N truncated-Pareto renewal
    /// streams.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Trace in the canonical CSV format.
    #[arg(long)]
    pub input: PathBuf,
    /// Keep only events sent to this printer.
    #[arg(long)]
    pub printer: Option<String>,
    /// Comma-separated size thresholds in bytes; scientific notation is
    /// accepted.
    #[arg(long, default_value = "0,1e4,1e5,1e6")]
    pub thresholds: String,
    /// Geometric bin growth factor.
    #[arg(long = "bin-ratio", default_value_t = crate::distributions::DEFAULT_BIN_RATIO)]
    pub bin_ratio: f64,
    /// Smallest bin edge in seconds.
    #[arg(long = "t-min", default_value_t = crate::distributions::DEFAULT_T_MIN)]
    pub t_min: f64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CollapseArgs {
    /// Trace in the canonical CSV format.
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated size thresholds in bytes.
    #[arg(long, default_value = "0,1e4,1e5,1e6")]
    pub thresholds: String,
    /// Geometric bin growth factor.
    #[arg(long = "bin-ratio", default_value_t = crate::distributions::DEFAULT_BIN_RATIO)]
    pub bin_ratio: f64,
    /// Smallest bin edge in seconds.
    #[arg(long = "t-min", default_value_t = crate::distributions::DEFAULT_T_MIN)]
    pub t_min: f64,
    /// Minimum per-bin count for collapse scoring.
    #[arg(long = "min-count", default_value_t = crate::distributions::DEFAULT_MIN_BIN_COUNT)]
    pub min_count: usize,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct UserStatsArgs {
    /// Trace in the canonical CSV format.
    #[arg(long)]
    pub input: PathBuf,
    /// Users need at least this many requests to qualify.
    #[arg(long = "min-requests", default_value_t = crate::distributions::DEFAULT_MIN_REQUESTS)]
    pub min_requests: usize,
    /// Analyze this user's autocorrelation instead of the busiest one.
    #[arg(long)]
    pub user: Option<String>,
    /// Largest autocorrelation lag (clamped to the sequence length).
    #[arg(long = "max-lag", default_value_t = crate::signal::DEFAULT_MAX_LAG)]
    pub max_lag: usize,
    /// Also emit a shuffled-control autocorrelation with this seed.
    #[arg(long = "shuffle-seed")]
    pub shuffle_seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Trace in the canonical CSV format.
    #[arg(long)]
    pub input: PathBuf,
    /// Segment length in samples; must be a power of two.
    #[arg(long, default_value_t = crate::signal::DEFAULT_SEGMENT_LENGTH)]
    pub segment: usize,
    /// Logarithmic frequency bins per decade.
    #[arg(long = "bins-per-decade", default_value_t = crate::signal::DEFAULT_BINS_PER_DECADE)]
    pub bins_per_decade: usize,
    /// Lower edge of the slope fit band in Hz.
    #[arg(long = "fit-lo", default_value_t = crate::signal::DEFAULT_SPECTRAL_FIT_BAND.0)]
    pub fit_lo: f64,
    /// Upper edge of the slope fit band in Hz.
    #[arg(long = "fit-hi", default_value_t = crate::signal::DEFAULT_SPECTRAL_FIT_BAND.1)]
    pub fit_hi: f64,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator configuration as JSON; explicit flags override fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of streams [default: 1000].
    #[arg(long)]
    pub streams: Option<u32>,
    /// Tail exponent of the interval distribution [default: 0.3].
    #[arg(long)]
    pub k: Option<f64>,
    /// Lower interval cutoff in seconds [default: 2.5].
    #[arg(long)]
    pub a: Option<f64>,
    /// Upper interval cutoff in seconds [default: 2.524e8].
    #[arg(long)]
    pub b: Option<f64>,
    /// Warm-up discarded before recording, in 365-day years [default: 5].
    #[arg(long = "warmup-years")]
    pub warmup_years: Option<f64>,
    /// Recorded span in 365-day years [default: 1].
    #[arg(long)]
    pub years: Option<f64>,
    /// Master seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Attach q-exponential sizes, given as `s_star,gamma_minus_1`.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Path of the trace CSV to write; a manifest is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parse arguments from the process environment and run. Returns the
/// process exit code.
pub fn main() -> i32 {
    run(&Cli::parse())
}

/// Run a parsed command, mapping errors to the exit-code contract.
pub fn run(cli: &Cli) -> i32 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze(args) => commands::analyze(args),
        Command::Collapse(args) => commands::collapse(args),
        Command::UserStats(args) => commands::user_stats(args),
        Command::Spectrum(args) => commands::spectrum(args),
        Command::Generate(args) => commands::generate(args),
    }
}

/// Parse a comma-separated threshold list; scientific notation is
/// accepted and values are rounded to whole bytes.
pub fn parse_thresholds(text: &str) -> Result<Vec<u64>> {
    let mut thresholds = Vec::new();
    for field in text.split(',') {
        let field = field.trim();
        let value: f64 = field
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("threshold `{field}` is not a number")))?;
        if !value.is_finite() || value < 0.0 || value > u64::MAX as f64 {
            return Err(Error::InvalidParameter(format!(
                "threshold `{field}` is out of range"
            )));
        }
        thresholds.push(value.round() as u64);
    }
    if thresholds.is_empty() {
        return Err(Error::InvalidParameter("empty threshold list".into()));
    }
    Ok(thresholds)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(7 + 64);
    out.push_str("sha256:");
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}
