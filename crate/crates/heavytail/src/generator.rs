//! Event-driven simulator of N independent renewal streams with
//! truncated-Pareto inter-arrival times, plus the inverse-CDF samplers it
//! is built from.
//!
//! Each stream draws i.i.d. intervals from [`TruncatedPareto`]; the first
//! arrival of every stream is a full interval drawn from time 0
//! (synchronized start), and the configured warm-up absorbs the transient
//! that induces. Arrivals inside the recording window are emitted with
//! timestamps floored to whole seconds and shifted so the end of warm-up
//! is 0; [`simulate_arrivals`] exposes the exact sub-second arrival times
//! for resolution studies.
//!
//! Randomness is split per stream from the master seed, so output is
//! bit-identical for a given seed regardless of how streams are swept.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{EventLog, PrintEvent};

/// Printer label attached to simulated events.
pub const SIMULATED_PRINTER: &str = "simulated";

/// Pareto density `k x^{-1-k}` truncated to `[lower, upper]` and
/// renormalized.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedPareto {
    tail_exponent: f64,
    lower_cutoff: f64,
    upper_cutoff: f64,
    // a^{-k} and a^{-k} - b^{-k}, precomputed.
    lower_pow: f64,
    pow_span: f64,
}

impl TruncatedPareto {
    /// Validates `k > 0` and `1 <= a < b`.
    pub fn new(tail_exponent: f64, lower_cutoff: f64, upper_cutoff: f64) -> Result<Self> {
        if !(tail_exponent.is_finite() && tail_exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail exponent must be positive, got {tail_exponent}"
            )));
        }
        if !(lower_cutoff >= 1.0 && upper_cutoff > lower_cutoff && upper_cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "cutoffs must satisfy 1 <= lower < upper, got [{lower_cutoff}, {upper_cutoff}]"
            )));
        }
        let lower_pow = lower_cutoff.powf(-tail_exponent);
        let upper_pow = upper_cutoff.powf(-tail_exponent);
        Ok(TruncatedPareto {
            tail_exponent,
            lower_cutoff,
            upper_cutoff,
            lower_pow,
            pow_span: lower_pow - upper_pow,
        })
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail_exponent
    }

    pub fn lower_cutoff(&self) -> f64 {
        self.lower_cutoff
    }

    pub fn upper_cutoff(&self) -> f64 {
        self.upper_cutoff
    }

    /// Quantile function: maps `u` in [0, 1] to a duration in
    /// `[lower, upper]`, continuous and increasing in `u`.
    ///
    /// # Panics
    ///
    /// Panics if `u` is outside [0, 1].
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        assert!((0.0..=1.0).contains(&u), "u must be in [0, 1], got {u}");
        (self.lower_pow - u * self.pow_span).powf(-1.0 / self.tail_exponent)
    }

    /// Distribution function, clamped to [0, 1] outside the support.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lower_cutoff {
            0.0
        } else if x >= self.upper_cutoff {
            1.0
        } else {
            (self.lower_pow - x.powf(-self.tail_exponent)) / self.pow_span
        }
    }

    /// Closed-form mean of the truncated distribution.
    pub fn mean(&self) -> f64 {
        let (k, a, b) = (self.tail_exponent, self.lower_cutoff, self.upper_cutoff);
        if k == 1.0 {
            (b / a).ln() / self.pow_span
        } else {
            k / (1.0 - k) * (b.powf(1.0 - k) - a.powf(1.0 - k)) / self.pow_span
        }
    }

    /// Draw one interval.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.inverse_cdf(rng.random::<f64>())
    }
}

/// Quantile of the truncated Pareto distribution, validating both the
/// parameters and `u`.
pub fn pareto_inverse_cdf(u: f64, tail_exponent: f64, lower: f64, upper: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "quantile argument must be in [0, 1], got {u}"
        )));
    }
    Ok(TruncatedPareto::new(tail_exponent, lower, upper)?.inverse_cdf(u))
}

/// Closed-form mean of the truncated Pareto distribution.
pub fn pareto_mean(tail_exponent: f64, lower: f64, upper: f64) -> Result<f64> {
    Ok(TruncatedPareto::new(tail_exponent, lower, upper)?.mean())
}

/// Parameters of the q-exponential size distribution with CCDF
/// `(1 + s/s_star)^{-gamma_minus_1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeModel {
    /// Crossover scale in bytes.
    pub s_star: f64,
    /// Tail exponent of the CCDF.
    pub gamma_minus_1: f64,
}

impl SizeModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.s_star > 0.0 && self.gamma_minus_1 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "size model needs s_star > 0 and gamma_minus_1 > 0, got ({}, {})",
                self.s_star, self.gamma_minus_1
            )));
        }
        Ok(())
    }

    /// Analytic CCDF: probability that a sampled size exceeds `s`.
    pub fn ccdf(&self, s: f64) -> f64 {
        (1.0 + s / self.s_star).powf(-self.gamma_minus_1)
    }
}

/// Map `u` in (0, 1] to a size in bytes whose CCDF is
/// `(1 + s/s_star)^{-gamma_minus_1}`. `u = 1` gives 0 bytes; `u = 0` is
/// rejected (the inverse is unbounded there).
pub fn sample_q_exponential_size(u: f64, model: &SizeModel) -> Result<u64> {
    model.validate()?;
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "size quantile argument must be in (0, 1], got {u}"
        )));
    }
    let size = model.s_star * (u.powf(-1.0 / model.gamma_minus_1) - 1.0);
    Ok(size.round() as u64)
}

/// Configuration of the N-stream renewal simulator.
///
/// JSON configuration files use exactly these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Number of independent streams.
    pub n_streams: u32,
    /// Tail exponent k of the interval distribution.
    pub tail_exponent: f64,
    /// Lower interval cutoff in seconds.
    pub lower_cutoff: f64,
    /// Upper interval cutoff in seconds.
    pub upper_cutoff: f64,
    /// Seconds discarded before recording starts.
    pub warmup: f64,
    /// Seconds recorded after warm-up.
    pub horizon: f64,
    /// Master seed; all per-stream randomness derives from it.
    pub seed: u64,
    /// Optional size distribution attached to emitted events.
    #[serde(default)]
    pub size_model: Option<SizeModel>,
}

/// Seconds in a 365-day year, the unit used by the CLI's year flags.
pub const SECONDS_PER_YEAR: f64 = 365.0 * 86_400.0;

impl Default for GeneratorConfig {
    /// 1000 streams, k = 0.3, cutoffs 2.5 s and 2.524e8 s (about eight
    /// years), five-year warm-up, one-year horizon.
    fn default() -> Self {
        GeneratorConfig {
            n_streams: 1000,
            tail_exponent: 0.3,
            lower_cutoff: 2.5,
            upper_cutoff: 2.524e8,
            warmup: 5.0 * SECONDS_PER_YEAR,
            horizon: SECONDS_PER_YEAR,
            seed: 0,
            size_model: None,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_streams < 1 {
            return Err(Error::InvalidParameter("n_streams must be >= 1".into()));
        }
        TruncatedPareto::new(self.tail_exponent, self.lower_cutoff, self.upper_cutoff)?;
        if self.horizon.is_nan() || self.horizon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if self.warmup.is_nan() || self.warmup < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "warmup must be non-negative, got {}",
                self.warmup
            )));
        }
        if let Some(model) = &self.size_model {
            model.validate()?;
        }
        Ok(())
    }

    pub fn interval_distribution(&self) -> Result<TruncatedPareto> {
        TruncatedPareto::new(self.tail_exponent, self.lower_cutoff, self.upper_cutoff)
    }
}

/// One exact arrival: sub-second time relative to the end of warm-up,
/// plus the id of the stream that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub time: f64,
    pub stream: u32,
}

// Substream derivation: the ChaCha key is the little-endian master seed,
// the little-endian stream id, and an 8-byte domain tag. Streams are
// independent of each other and of the size-attachment generator.
fn derived_rng(seed: u64, lane: u64, tag: &[u8; 8]) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&lane.to_le_bytes());
    key[16..24].copy_from_slice(tag);
    ChaCha8Rng::from_seed(key)
}

fn stream_rng(seed: u64, stream: u32) -> ChaCha8Rng {
    derived_rng(seed, stream as u64, b"arrivals")
}

fn size_rng(seed: u64) -> ChaCha8Rng {
    derived_rng(seed, 0, b"sizes\0\0\0")
}

#[derive(Debug)]
struct ScheduledArrival {
    time: f64,
    stream: u32,
}

// Min-heap order on (time, stream); times are finite by construction.
impl Ord for ScheduledArrival {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.stream.cmp(&other.stream))
    }
}

impl PartialOrd for ScheduledArrival {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for ScheduledArrival {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}

impl Eq for ScheduledArrival {}

/// Run the simulation and return exact (sub-second) arrival times in
/// nondecreasing order, shifted so the end of warm-up is 0.
///
/// Each stream schedules its first arrival as a full interval from
/// absolute time 0 and reschedules with a fresh draw upon each arrival;
/// arrivals in `[warmup, warmup + horizon)` are returned.
pub fn simulate_arrivals(config: &GeneratorConfig) -> Result<Vec<Arrival>> {
    config.validate()?;
    let dist = config.interval_distribution()?;
    let end = config.warmup + config.horizon;

    let mut rngs: Vec<ChaCha8Rng> = (0..config.n_streams)
        .map(|s| stream_rng(config.seed, s))
        .collect();
    let mut heap: BinaryHeap<Reverse<ScheduledArrival>> = (0..config.n_streams)
        .map(|stream| {
            let time = dist.sample(&mut rngs[stream as usize]);
            Reverse(ScheduledArrival { time, stream })
        })
        .collect();

    let mut arrivals = Vec::new();
    while let Some(Reverse(ScheduledArrival { time, stream })) = heap.pop() {
        if time >= end {
            // Intervals are positive, so this stream is done.
            continue;
        }
        if time >= config.warmup {
            arrivals.push(Arrival {
                time: time - config.warmup,
                stream,
            });
        }
        let next = time + dist.sample(&mut rngs[stream as usize]);
        heap.push(Reverse(ScheduledArrival { time: next, stream }));
    }
    Ok(arrivals)
}

/// Run the simulation and return an [`EventLog`] in the canonical trace
/// schema: timestamps floored to whole seconds, user set to the stream
/// id, printer set to [`SIMULATED_PRINTER`], and sizes 0 unless
/// `config.size_model` is given. Fully deterministic per seed.
pub fn simulate(config: &GeneratorConfig) -> Result<EventLog> {
    let arrivals = simulate_arrivals(config)?;
    let events = arrivals
        .into_iter()
        .map(|a| PrintEvent {
            timestamp: a.time.floor() as u64,
            user: a.stream.to_string(),
            size: 0,
            printer: SIMULATED_PRINTER.to_string(),
        })
        .collect();
    let log = EventLog::from_events(events);
    match &config.size_model {
        Some(model) => attach_sizes(&log, model, config.seed),
        None => Ok(log),
    }
}

/// Replace every event's size with an i.i.d. draw from `model`,
/// leaving timestamps and order untouched. Deterministic per seed.
pub fn attach_sizes(log: &EventLog, model: &SizeModel, seed: u64) -> Result<EventLog> {
    model.validate()?;
    let mut rng = size_rng(seed);
    let events = log
        .events()
        .iter()
        .map(|event| {
            // 1 - u in (0, 1], so the inverse CCDF is always finite.
            let u = 1.0 - rng.random::<f64>();
            let size = sample_q_exponential_size(u, model)?;
            Ok(PrintEvent {
                size,
                ..event.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EventLog::from_events(events))
}
