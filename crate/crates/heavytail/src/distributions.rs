//! Inter-arrival interval sets, log-binned densities, size CCDFs, rates,
//! rescaled densities, and the collapse-quality score.
//!
//! The central objects are interval sets conditioned on a size threshold
//! (consecutive gaps between events larger than S bytes) or on a user
//! (gaps between one user's events), and their probability densities
//! estimated with geometrically growing bins. Dividing a thresholded
//! density's time axis by its event rate R(S) = N(>S)/T rescales all
//! thresholds onto a common curve when the trace is scale invariant;
//! [`collapse_score`] quantifies how well that holds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::EventLog;

/// Default geometric bin growth factor.
pub const DEFAULT_BIN_RATIO: f64 = 1.2;
/// Default smallest bin edge in seconds (the trace resolution).
pub const DEFAULT_T_MIN: f64 = 1.0;
/// Bins with fewer counts than this are excluded from fits and collapse
/// scoring.
pub const DEFAULT_MIN_BIN_COUNT: usize = 20;
/// Users need at least this many requests to enter per-user statistics
/// ("more than three").
pub const DEFAULT_MIN_REQUESTS: usize = 4;

/// Where an interval set came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntervalSource {
    /// Gaps between events with size strictly greater than the threshold.
    Threshold(u64),
    /// Gaps between one user's events.
    User(String),
    /// Per-user gap lists concatenated over all qualifying users.
    ConcatenatedUsers,
    /// Produced by the renewal simulator.
    Simulated,
}

/// A sequence of positive durations (seconds, or dimensionless after
/// rescaling) plus provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    /// Every entry is > 0.
    pub intervals: Vec<f64>,
    pub source: IntervalSource,
    /// Number of zero-length gaps removed during construction.
    pub n_dropped_zero: usize,
}

impl IntervalSet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Multiply every interval by `factor` (> 0), e.g. by a rate R to
    /// form the dimensionless scaling variable x = t R.
    pub fn scaled_by(&self, factor: f64) -> IntervalSet {
        assert!(factor > 0.0, "scale factor must be positive, got {factor}");
        IntervalSet {
            intervals: self.intervals.iter().map(|&t| t * factor).collect(),
            source: self.source.clone(),
            n_dropped_zero: self.n_dropped_zero,
        }
    }
}

fn diffs_dropping_zeros(timestamps: &[u64]) -> (Vec<f64>, usize) {
    let mut intervals = Vec::with_capacity(timestamps.len().saturating_sub(1));
    let mut dropped = 0;
    for pair in timestamps.windows(2) {
        let dt = pair[1] - pair[0];
        if dt == 0 {
            dropped += 1;
        } else {
            intervals.push(dt as f64);
        }
    }
    (intervals, dropped)
}

/// Consecutive gaps between events with size strictly greater than
/// `threshold`, zero gaps dropped and counted. Needs at least two
/// qualifying events.
pub fn thresholded_intervals(log: &EventLog, threshold: u64) -> Result<IntervalSet> {
    let timestamps: Vec<u64> = log
        .events()
        .iter()
        .filter(|e| e.size > threshold)
        .map(|e| e.timestamp)
        .collect();
    if timestamps.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "threshold {threshold}: {} qualifying events, need at least 2",
            timestamps.len()
        )));
    }
    let (intervals, n_dropped_zero) = diffs_dropping_zeros(&timestamps);
    Ok(IntervalSet {
        intervals,
        source: IntervalSource::Threshold(threshold),
        n_dropped_zero,
    })
}

fn timestamps_by_user(log: &EventLog) -> BTreeMap<&str, Vec<u64>> {
    let mut per_user: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    for event in log.events() {
        per_user
            .entry(event.user.as_str())
            .or_default()
            .push(event.timestamp);
    }
    per_user
}

/// Per-user consecutive gaps for every user with at least `min_requests`
/// events, concatenated (gaps are never taken across users). Zero gaps
/// are dropped and counted.
pub fn per_user_intervals(log: &EventLog, min_requests: usize) -> Result<IntervalSet> {
    let per_user = timestamps_by_user(log);
    let mut intervals = Vec::new();
    let mut n_dropped_zero = 0;
    let mut qualifying = 0;
    for timestamps in per_user.values() {
        if timestamps.len() < min_requests {
            continue;
        }
        qualifying += 1;
        let (mut user_intervals, dropped) = diffs_dropping_zeros(timestamps);
        intervals.append(&mut user_intervals);
        n_dropped_zero += dropped;
    }
    if qualifying == 0 {
        return Err(Error::InsufficientData(format!(
            "no user has at least {min_requests} requests"
        )));
    }
    Ok(IntervalSet {
        intervals,
        source: IntervalSource::ConcatenatedUsers,
        n_dropped_zero,
    })
}

/// Number of users with at least `min_requests` events.
pub fn count_qualifying_users(log: &EventLog, min_requests: usize) -> usize {
    timestamps_by_user(log)
        .values()
        .filter(|t| t.len() >= min_requests)
        .count()
}

/// Consecutive gaps between one user's events.
pub fn user_intervals(log: &EventLog, user: &str) -> Result<IntervalSet> {
    let timestamps: Vec<u64> = log
        .events()
        .iter()
        .filter(|e| e.user == user)
        .map(|e| e.timestamp)
        .collect();
    if timestamps.is_empty() {
        return Err(Error::UnknownUser(user.to_string()));
    }
    if timestamps.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "user {user} has a single event"
        )));
    }
    let (intervals, n_dropped_zero) = diffs_dropping_zeros(&timestamps);
    Ok(IntervalSet {
        intervals,
        source: IntervalSource::User(user.to_string()),
        n_dropped_zero,
    })
}

/// The user with the most events (lexicographically smallest on ties),
/// with their event count. `None` on an empty log.
pub fn busiest_user(log: &EventLog) -> Option<(String, usize)> {
    timestamps_by_user(log)
        .into_iter()
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0)))
        .map(|(user, timestamps)| (user.to_string(), timestamps.len()))
}

/// Probability density over geometrically growing bins.
///
/// Bin j covers `[edges[j], edges[j+1])` with
/// `edges[j] = t_min * bin_ratio^j`, and
/// `densities[j] = counts[j] / (total * width_j)`, so the densities
/// integrate to 1 over the binned range.
#[derive(Debug, Clone, PartialEq)]
pub struct LogBinnedDensity {
    /// Bin boundaries, strictly increasing, one more than bins.
    pub bin_edges: Vec<f64>,
    /// Raw per-bin sample counts.
    pub counts: Vec<usize>,
    /// Per-bin density: count / (total * bin width).
    pub densities: Vec<f64>,
    /// Geometric growth factor of the edges.
    pub bin_ratio: f64,
}

impl LogBinnedDensity {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total_count(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Geometric center of bin j.
    pub fn bin_center(&self, j: usize) -> f64 {
        (self.bin_edges[j] * self.bin_edges[j + 1]).sqrt()
    }

    /// Sum of density times bin width; 1 by construction.
    pub fn integral(&self) -> f64 {
        self.densities
            .iter()
            .zip(self.bin_edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum()
    }

    /// Index of the bin containing `x`, if any.
    pub fn bin_index(&self, x: f64) -> Option<usize> {
        if x < self.bin_edges[0] || x >= *self.bin_edges.last().unwrap() {
            return None;
        }
        Some(self.bin_edges.partition_point(|&e| e <= x) - 1)
    }
}

/// Estimate the density of an interval set with geometrically growing
/// bins starting at `t_min` and covering the largest interval.
///
/// Samples below `t_min` are left out of both the counts and the
/// normalizing total, so the result always integrates to 1 over its
/// bins. Requires `bin_ratio > 1`, `t_min > 0`, and a nonempty set with
/// at least one sample at or above `t_min`.
pub fn log_binned_density(
    set: &IntervalSet,
    bin_ratio: f64,
    t_min: f64,
) -> Result<LogBinnedDensity> {
    if !(bin_ratio.is_finite() && bin_ratio > 1.0) {
        return Err(Error::InvalidParameter(format!(
            "bin ratio must exceed 1, got {bin_ratio}"
        )));
    }
    if t_min.is_nan() || t_min <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "t_min must be positive, got {t_min}"
        )));
    }
    if set.is_empty() {
        return Err(Error::InsufficientData("empty interval set".into()));
    }
    let max = set
        .intervals
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if max < t_min {
        return Err(Error::InsufficientData(format!(
            "no intervals at or above t_min = {t_min}"
        )));
    }

    let mut n_bins = ((max / t_min).ln() / bin_ratio.ln()).ceil().max(1.0) as i32;
    while t_min * bin_ratio.powi(n_bins) <= max {
        n_bins += 1;
    }
    let bin_edges: Vec<f64> = (0..=n_bins).map(|j| t_min * bin_ratio.powi(j)).collect();

    let mut counts = vec![0usize; n_bins as usize];
    let last_bin = counts.len() - 1;
    for &t in &set.intervals {
        if t < t_min {
            continue;
        }
        let j = bin_edges.partition_point(|&e| e <= t) - 1;
        counts[j.min(last_bin)] += 1;
    }
    let total: usize = counts.iter().sum();
    let densities: Vec<f64> = counts
        .iter()
        .zip(bin_edges.windows(2))
        .map(|(&c, e)| c as f64 / (total as f64 * (e[1] - e[0])))
        .collect();

    Ok(LogBinnedDensity {
        bin_edges,
        counts,
        densities,
        bin_ratio,
    })
}

/// Multiply the time axis by a rate and divide the densities by it,
/// turning a density over seconds into one over the dimensionless
/// variable x = t R. Normalization is preserved exactly.
pub fn rescale_density(density: &LogBinnedDensity, rate: f64) -> LogBinnedDensity {
    assert!(rate > 0.0, "rate must be positive, got {rate}");
    LogBinnedDensity {
        bin_edges: density.bin_edges.iter().map(|&e| e * rate).collect(),
        counts: density.counts.clone(),
        densities: density.densities.iter().map(|&d| d / rate).collect(),
        bin_ratio: density.bin_ratio,
    }
}

/// Complementary cumulative size counts: for every distinct observed
/// size s, the number of events strictly larger than s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeCcdf {
    /// (size, N(>size)) sampled at every distinct observed size,
    /// ascending; the final point has count 0.
    pub points: Vec<(u64, usize)>,
    /// N(>0): number of events with positive size.
    pub total: usize,
}

/// Compute the size CCDF of a log. Empty logs give an empty CCDF.
pub fn size_ccdf(log: &EventLog) -> SizeCcdf {
    let mut sizes: Vec<u64> = log.events().iter().map(|e| e.size).collect();
    sizes.sort_unstable();
    let n = sizes.len();
    let total = n - sizes.partition_point(|&s| s == 0);

    let mut points = Vec::new();
    let mut i = 0;
    while i < n {
        let size = sizes[i];
        let mut j = i + 1;
        while j < n && sizes[j] == size {
            j += 1;
        }
        points.push((size, n - j));
        i = j;
    }
    SizeCcdf { points, total }
}

/// Event rate above one size threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    /// Size threshold S in bytes.
    pub threshold: u64,
    /// Number of events with size > S.
    pub n_gt: usize,
    /// R(S) = N(>S) / T in events per second, with T the full log span.
    pub rate: f64,
    /// Mean time between qualifying events, 1 / R(S).
    pub mean_interval: f64,
}

/// Rates for a family of thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub entries: Vec<RateEntry>,
}

/// Rate of events larger than `threshold` over the full log span.
///
/// All qualifying events are counted, including ones that contribute
/// zero-length gaps; the span must be positive.
pub fn event_rate(log: &EventLog, threshold: u64) -> Result<RateEntry> {
    let span = log.span();
    if span == 0 {
        return Err(Error::InsufficientData(
            "log span is zero, rate undefined".into(),
        ));
    }
    let n_gt = log.count_larger_than(threshold);
    if n_gt == 0 {
        return Err(Error::InsufficientData(format!(
            "threshold {threshold}: no qualifying events, rate undefined"
        )));
    }
    let rate = n_gt as f64 / span as f64;
    Ok(RateEntry {
        threshold,
        n_gt,
        rate,
        mean_interval: 1.0 / rate,
    })
}

/// [`event_rate`] over a family of thresholds.
pub fn rate_table(log: &EventLog, thresholds: &[u64]) -> Result<RateTable> {
    let entries = thresholds
        .iter()
        .map(|&s| event_rate(log, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTable { entries })
}

/// How well a family of rescaled densities falls on one curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseReport {
    /// Median over common well-populated bins of the log-density spread
    /// (max - min) / |mean| across curves; 0 is a perfect collapse.
    pub score: f64,
    /// Intersection of the curves' binned ranges.
    pub common_support: (f64, f64),
    /// Number of evaluation bins that entered the median.
    pub n_bins_scored: usize,
}

/// Score a family of (rescaled) densities for collapse quality.
///
/// Evaluation points are laid out geometrically over the intersection of
/// the curves' ranges. A point is scored only where every curve has at
/// least `min_count` samples in its containing bin; there the spread
/// `(max - min) / |mean|` of the curves' log-densities is taken, and the
/// score is the median spread. 0 means a perfect collapse. The score
/// does not depend on the order of the curves.
pub fn collapse_report(curves: &[LogBinnedDensity], min_count: usize) -> Result<CollapseReport> {
    if curves.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "collapse needs at least 2 curves, got {}",
            curves.len()
        )));
    }
    let lo = curves
        .iter()
        .map(|c| c.bin_edges[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = curves
        .iter()
        .map(|c| *c.bin_edges.last().unwrap())
        .fold(f64::INFINITY, f64::min);
    if lo >= hi {
        return Err(Error::InsufficientData(
            "curves have no common support".into(),
        ));
    }

    let ratio = curves
        .iter()
        .map(|c| c.bin_ratio)
        .fold(f64::INFINITY, f64::min);
    let mut spreads = Vec::new();
    let mut x = lo * ratio.sqrt();
    while x < hi {
        let mut values = Vec::with_capacity(curves.len());
        for curve in curves {
            match curve.bin_index(x) {
                Some(j) if curve.counts[j] >= min_count.max(1) && curve.densities[j] > 0.0 => {
                    values.push(curve.densities[j].ln())
                }
                _ => break,
            }
        }
        if values.len() == curves.len() {
            // Sort so the score is bit-identical under curve reordering.
            values.sort_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            if mean != 0.0 {
                spreads.push((values[values.len() - 1] - values[0]) / mean.abs());
            }
        }
        x *= ratio;
    }
    if spreads.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no common bins with at least {min_count} counts in every curve"
        )));
    }
    spreads.sort_by(f64::total_cmp);
    let mid = spreads.len() / 2;
    let score = if spreads.len() % 2 == 1 {
        spreads[mid]
    } else {
        0.5 * (spreads[mid - 1] + spreads[mid])
    };
    Ok(CollapseReport {
        score,
        common_support: (lo, hi),
        n_bins_scored: spreads.len(),
    })
}

/// The score from [`collapse_report`] alone.
pub fn collapse_score(curves: &[LogBinnedDensity], min_count: usize) -> Result<f64> {
    Ok(collapse_report(curves, min_count)?.score)
}
