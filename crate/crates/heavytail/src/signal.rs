//! Time- and frequency-domain dependence analysis: lag autocorrelation
//! of interval sequences, shuffle controls, counts-per-second series,
//! and segmented power spectra.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::distributions::IntervalSet;
use crate::error::{Error, Result};
use crate::ingest::EventLog;

/// Default spectrum segment length (2^20 one-second samples).
pub const DEFAULT_SEGMENT_LENGTH: usize = 1 << 20;
/// Default number of logarithmic frequency bins per decade.
pub const DEFAULT_BINS_PER_DECADE: usize = 10;
/// Default frequency band for spectral slope fits, in Hz. Sits below the
/// short-time end of the spectrum; the diurnal line at 1.16e-5 Hz falls
/// inside and shows up in the fit residual rather than being filtered.
pub const DEFAULT_SPECTRAL_FIT_BAND: (f64, f64) = (1e-6, 1e-3);
/// Default maximum lag for autocorrelation runs.
pub const DEFAULT_MAX_LAG: usize = 1000;

/// Events per one-second slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSeries {
    /// Epoch second of the first slot.
    pub t0: u64,
    /// Slot i counts events with timestamp t0 + i; gaps are zero.
    pub counts: Vec<u32>,
}

impl CountSeries {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total number of events in the covered window.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }
}

/// Bin a log into the per-second count series covering
/// `[first timestamp, last timestamp]`.
pub fn counts_per_second(log: &EventLog) -> Result<CountSeries> {
    let events = log.events();
    let (first, last) = match (events.first(), events.last()) {
        (Some(f), Some(l)) => (f.timestamp, l.timestamp),
        _ => return Err(Error::InsufficientData("empty log".into())),
    };
    let length = (last - first + 1) as usize;
    let mut counts = vec![0u32; length];
    for event in events {
        counts[(event.timestamp - first) as usize] += 1;
    }
    Ok(CountSeries { t0: first, counts })
}

/// Unnormalized lag autocorrelation of an interval sequence:
/// `a(tau) = (1/(N - tau)) * sum_i s_i s_{i+tau}` with
/// `s_i = t_i - mean(t)`. Lag 0 equals the biased sample variance.
#[derive(Debug, Clone, PartialEq)]
pub struct Autocorrelation {
    /// `values[tau]` is a(tau), for tau = 0..=tau_max. Units are the
    /// square of the interval units.
    pub values: Vec<f64>,
    /// Sequence length the correlation was computed from.
    pub n: usize,
}

impl Autocorrelation {
    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// (lag, value) pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().copied().enumerate()
    }
}

/// Compute a(tau) for tau = 0..=tau_max, subtracting the global mean
/// once and dividing each lag by N - tau. Requires N > tau_max >= 1.
pub fn autocorrelation(set: &IntervalSet, tau_max: usize) -> Result<Autocorrelation> {
    let n = set.len();
    if tau_max < 1 {
        return Err(Error::InvalidParameter("tau_max must be at least 1".into()));
    }
    if n <= tau_max {
        return Err(Error::InsufficientData(format!(
            "autocorrelation needs more than tau_max = {tau_max} intervals, got {n}"
        )));
    }
    let mean = set.intervals.iter().sum::<f64>() / n as f64;
    let deviations: Vec<f64> = set.intervals.iter().map(|&t| t - mean).collect();
    let values = (0..=tau_max)
        .map(|tau| {
            let m = n - tau;
            let sum: f64 = (0..m).map(|i| deviations[i] * deviations[i + tau]).sum();
            sum / m as f64
        })
        .collect();
    Ok(Autocorrelation { values, n })
}

/// Uniformly random permutation of the intervals, deterministic per
/// seed. The multiset of values (and anything that depends only on it,
/// like the mean and a(0)) is preserved exactly.
pub fn shuffle_intervals(set: &IntervalSet, seed: u64) -> IntervalSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut intervals = set.intervals.clone();
    intervals.shuffle(&mut rng);
    IntervalSet {
        intervals,
        source: set.source.clone(),
        n_dropped_zero: set.n_dropped_zero,
    }
}

/// Averaged periodogram over log-spaced frequency bins.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    /// Bin center frequencies in Hz, strictly increasing, at most the
    /// Nyquist frequency 0.5 Hz.
    pub freqs: Vec<f64>,
    /// Mean periodogram value per bin.
    pub power: Vec<f64>,
    pub segment_length: usize,
    pub n_segments: usize,
}

impl PowerSpectrum {
    /// (frequency, power) pairs, e.g. for slope fitting.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.freqs
            .iter()
            .copied()
            .zip(self.power.iter().copied())
            .collect()
    }
}

/// One-sided periodogram of a single segment at unit sample rate.
///
/// The segment mean is subtracted first; entry k-1 is the power at
/// frequency k/N Hz for k = 1..=N/2 (DC excluded), normalized so the
/// entries sum to the segment's biased variance times N.
pub fn segment_periodogram(segment: &[f64]) -> Vec<f64> {
    let n = segment.len();
    let mean = segment.iter().sum::<f64>() / n as f64;
    let mut buffer: Vec<Complex<f64>> = segment
        .iter()
        .map(|&x| Complex::new(x - mean, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);
    periodogram_from_fft(&buffer)
}

fn periodogram_from_fft(spectrum: &[Complex<f64>]) -> Vec<f64> {
    let n = spectrum.len();
    let half = n / 2;
    (1..=half)
        .map(|k| {
            let doubling = if k < half || n % 2 == 1 { 2.0 } else { 1.0 };
            doubling * spectrum[k].norm_sqr() / n as f64
        })
        .collect()
}

/// Bartlett-style averaged spectrum: split into non-overlapping
/// segments, mean-subtract and transform each, average the one-sided
/// periodograms, then average within log-spaced frequency bins.
///
/// `segment_length` must be a power of two and no longer than the
/// series; the DC component is excluded.
pub fn power_spectrum(
    series: &CountSeries,
    segment_length: usize,
    bins_per_decade: usize,
) -> Result<PowerSpectrum> {
    averaged_spectrum(&series.counts, segment_length, bins_per_decade)
}

/// [`power_spectrum`] for a plain sample slice at unit sample rate.
pub fn power_spectrum_of_samples(
    samples: &[f64],
    segment_length: usize,
    bins_per_decade: usize,
) -> Result<PowerSpectrum> {
    averaged_spectrum(samples, segment_length, bins_per_decade)
}

fn averaged_spectrum<T: Copy + Into<f64>>(
    data: &[T],
    segment_length: usize,
    bins_per_decade: usize,
) -> Result<PowerSpectrum> {
    if segment_length < 2 || !segment_length.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "segment length must be a power of two >= 2, got {segment_length}"
        )));
    }
    if bins_per_decade < 1 {
        return Err(Error::InvalidParameter(
            "bins_per_decade must be at least 1".into(),
        ));
    }
    let n_segments = data.len() / segment_length;
    if n_segments == 0 {
        return Err(Error::InsufficientData(format!(
            "series of {} samples is shorter than one segment of {segment_length}",
            data.len()
        )));
    }

    let fft = FftPlanner::new().plan_fft_forward(segment_length);
    let mut accumulated = vec![0.0f64; segment_length / 2];
    let mut buffer: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); segment_length];
    for seg in 0..n_segments {
        let chunk = &data[seg * segment_length..(seg + 1) * segment_length];
        let mean = chunk.iter().map(|&x| x.into()).sum::<f64>() / segment_length as f64;
        for (slot, &x) in buffer.iter_mut().zip(chunk) {
            *slot = Complex::new(x.into() - mean, 0.0);
        }
        fft.process(&mut buffer);
        for (acc, p) in accumulated.iter_mut().zip(periodogram_from_fft(&buffer)) {
            *acc += p;
        }
    }
    for value in &mut accumulated {
        *value /= n_segments as f64;
    }

    // Log-spaced binning of the raw frequencies k / segment_length.
    let scale = bins_per_decade as f64;
    let mut freqs = Vec::new();
    let mut power = Vec::new();
    let mut bin_id = i64::MIN;
    let mut sum_log_f = 0.0;
    let mut sum_power = 0.0;
    let mut members = 0usize;
    let flush = |sum_log_f: f64,
                 sum_power: f64,
                 members: usize,
                 freqs: &mut Vec<f64>,
                 power: &mut Vec<f64>| {
        if members > 0 {
            freqs.push((sum_log_f / members as f64).exp());
            power.push(sum_power / members as f64);
        }
    };
    for (idx, &p) in accumulated.iter().enumerate() {
        let f = (idx + 1) as f64 / segment_length as f64;
        let id = (f.log10() * scale).floor() as i64;
        if id != bin_id {
            flush(sum_log_f, sum_power, members, &mut freqs, &mut power);
            bin_id = id;
            sum_log_f = 0.0;
            sum_power = 0.0;
            members = 0;
        }
        sum_log_f += f.ln();
        sum_power += p;
        members += 1;
    }
    flush(sum_log_f, sum_power, members, &mut freqs, &mut power);

    Ok(PowerSpectrum {
        freqs,
        power,
        segment_length,
        n_segments,
    })
}
