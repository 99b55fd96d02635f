//! Implementations of the five subcommands.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{
    parse_thresholds, sha256_hex, write_json, AnalyzeArgs, CollapseArgs, GenerateArgs, RunManifest,
    SpectrumArgs, UserStatsArgs,
};
use crate::distributions::{
    busiest_user, collapse_report, event_rate, log_binned_density, per_user_intervals, rate_table,
    rescale_density, size_ccdf, thresholded_intervals, user_intervals, IntervalSet, IntervalSource,
    LogBinnedDensity, SizeCcdf, DEFAULT_BIN_RATIO, DEFAULT_MIN_BIN_COUNT, DEFAULT_T_MIN,
};
use crate::error::{Error, Result};
use crate::estimators::{fit_lognormal, fit_slope, DEFAULT_USER_FIT_RANGE};
use crate::generator::{simulate, GeneratorConfig, SizeModel, SECONDS_PER_YEAR};
use crate::ingest::{parse_log, summarize, write_log, EventLog};
use crate::signal::{
    autocorrelation, counts_per_second, power_spectrum, shuffle_intervals, Autocorrelation,
    PowerSpectrum,
};

/// Read and parse the input trace, returning the log plus the digest of
/// the raw bytes for the manifest.
fn load_trace(path: &Path) -> Result<(EventLog, String)> {
    let bytes = fs::read(path)?;
    let log = parse_log(bytes.as_slice())?;
    Ok((log, sha256_hex(&bytes)))
}

fn keep_printer(log: EventLog, printer: Option<&str>) -> EventLog {
    match printer {
        None => log,
        Some(label) => EventLog::from_events(
            log.events()
                .iter()
                .filter(|e| e.printer == label)
                .cloned()
                .collect(),
        ),
    }
}

fn write_density_csv(path: &Path, density: &LogBinnedDensity) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "bin_left,bin_right,bin_center_geometric,count,density")?;
    for j in 0..density.n_bins() {
        writeln!(
            w,
            "{},{},{},{},{}",
            density.bin_edges[j],
            density.bin_edges[j + 1],
            density.bin_center(j),
            density.counts[j],
            density.densities[j]
        )?;
    }
    Ok(())
}

fn write_ccdf_csv(path: &Path, ccdf: &SizeCcdf) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "size,n_gt")?;
    for &(size, n_gt) in &ccdf.points {
        writeln!(w, "{size},{n_gt}")?;
    }
    Ok(())
}

fn write_autocorr_csv(path: &Path, ac: &Autocorrelation) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "lag,a_tau")?;
    for (lag, value) in ac.iter() {
        writeln!(w, "{lag},{value}")?;
    }
    Ok(())
}

fn write_spectrum_csv(path: &Path, spectrum: &PowerSpectrum) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "freq_hz,power")?;
    for (f, p) in spectrum.freqs.iter().zip(&spectrum.power) {
        writeln!(w, "{f},{p}")?;
    }
    Ok(())
}

/// Emit one output file and record it in the manifest.
fn emit<F>(manifest: &mut RunManifest, dir: &Path, name: &str, write: F) -> Result<()>
where
    F: FnOnce(&Path) -> Result<()>,
{
    write(&dir.join(name))?;
    manifest.outputs.push(name.to_string());
    Ok(())
}

fn finish(manifest: &RunManifest, dir: &Path) -> Result<()> {
    write_json(&dir.join("manifest.json"), manifest)
}

pub fn analyze(args: &AnalyzeArgs) -> Result<()> {
    let thresholds = parse_thresholds(&args.thresholds)?;
    let (log, digest) = load_trace(&args.input)?;
    let log = keep_printer(log, args.printer.as_deref());
    fs::create_dir_all(&args.out)?;

    let mut manifest = RunManifest::new("analyze", Some(digest));
    manifest.set("input", args.input.display());
    manifest.set_optional("printer", &args.printer);
    manifest.set("thresholds", join_thresholds(&thresholds));
    manifest.set("bin_ratio", args.bin_ratio);
    manifest.set("t_min", args.t_min);

    let summary = summarize(&log)?;
    let rates = rate_table(&log, &thresholds)?;
    let ccdf = size_ccdf(&log);

    for &threshold in &thresholds {
        let set = thresholded_intervals(&log, threshold)?;
        let density = log_binned_density(&set, args.bin_ratio, args.t_min)?;
        emit(
            &mut manifest,
            &args.out,
            &format!("density_s{threshold}.csv"),
            |path| write_density_csv(path, &density),
        )?;
    }
    emit(&mut manifest, &args.out, "ccdf.csv", |path| {
        write_ccdf_csv(path, &ccdf)
    })?;
    emit(&mut manifest, &args.out, "rates.json", |path| {
        write_json(path, &rates)
    })?;
    emit(&mut manifest, &args.out, "summary.json", |path| {
        write_json(path, &summary)
    })?;
    finish(&manifest, &args.out)
}

#[derive(Serialize)]
struct CollapseOutput {
    thresholds: Vec<u64>,
    score: f64,
    common_support: (f64, f64),
    n_bins_scored: usize,
    min_count: usize,
}

pub fn collapse(args: &CollapseArgs) -> Result<()> {
    let thresholds = parse_thresholds(&args.thresholds)?;
    let (log, digest) = load_trace(&args.input)?;
    fs::create_dir_all(&args.out)?;

    let mut manifest = RunManifest::new("collapse", Some(digest));
    manifest.set("input", args.input.display());
    manifest.set("thresholds", join_thresholds(&thresholds));
    manifest.set("bin_ratio", args.bin_ratio);
    manifest.set("t_min", args.t_min);
    manifest.set("min_count", args.min_count);

    let mut rescaled_curves = Vec::with_capacity(thresholds.len());
    let mut pooled = Vec::new();
    for &threshold in &thresholds {
        let set = thresholded_intervals(&log, threshold)?;
        let rate = event_rate(&log, threshold)?.rate;
        let density = log_binned_density(&set, args.bin_ratio, args.t_min)?;
        let rescaled = rescale_density(&density, rate);
        emit(
            &mut manifest,
            &args.out,
            &format!("rescaled_s{threshold}.csv"),
            |path| write_density_csv(path, &rescaled),
        )?;
        rescaled_curves.push(rescaled);
        pooled.extend(set.scaled_by(rate).intervals);
    }

    let report = collapse_report(&rescaled_curves, args.min_count)?;
    let output = CollapseOutput {
        thresholds: thresholds.clone(),
        score: report.score,
        common_support: report.common_support,
        n_bins_scored: report.n_bins_scored,
        min_count: args.min_count,
    };
    emit(&mut manifest, &args.out, "collapse.json", |path| {
        write_json(path, &output)
    })?;

    let pooled_set = IntervalSet {
        intervals: pooled,
        source: IntervalSource::ConcatenatedUsers,
        n_dropped_zero: 0,
    };
    let lognormal = fit_lognormal(&pooled_set)?;
    emit(&mut manifest, &args.out, "lognormal.json", |path| {
        write_json(path, &lognormal.report())
    })?;
    finish(&manifest, &args.out)
}

#[derive(Serialize)]
struct AutocorrParams {
    user: String,
    n_intervals: usize,
    max_lag: usize,
    requested_max_lag: usize,
    shuffle_seed: Option<u64>,
    density_fit_range: (f64, f64),
    min_bin_count: usize,
}

pub fn user_stats(args: &UserStatsArgs) -> Result<()> {
    let (log, digest) = load_trace(&args.input)?;
    fs::create_dir_all(&args.out)?;

    let mut manifest = RunManifest::new("user-stats", Some(digest));
    manifest.set("input", args.input.display());
    manifest.set("min_requests", args.min_requests);
    manifest.set_optional("user", &args.user);
    manifest.set("max_lag", args.max_lag);
    manifest.set_optional("shuffle_seed", &args.shuffle_seed);

    let pooled = per_user_intervals(&log, args.min_requests)?;
    let density = log_binned_density(&pooled, DEFAULT_BIN_RATIO, DEFAULT_T_MIN)?;
    emit(&mut manifest, &args.out, "user_density.csv", |path| {
        write_density_csv(path, &density)
    })?;

    let points: Vec<(f64, f64)> = (0..density.n_bins())
        .filter(|&j| density.counts[j] >= DEFAULT_MIN_BIN_COUNT)
        .map(|j| (density.bin_center(j), density.densities[j]))
        .collect();
    let slope = fit_slope(&points, DEFAULT_USER_FIT_RANGE)?;
    emit(&mut manifest, &args.out, "user_density_fit.json", |path| {
        write_json(path, &slope.report())
    })?;

    let target = match &args.user {
        Some(user) => user.clone(),
        None => {
            busiest_user(&log)
                .ok_or_else(|| Error::InsufficientData("empty log".into()))?
                .0
        }
    };
    let set = user_intervals(&log, &target)?;
    if set.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "user {target} has too few intervals for autocorrelation"
        )));
    }
    let effective_lag = args.max_lag.min(set.len() - 1).max(1);
    let ac = autocorrelation(&set, effective_lag)?;
    emit(&mut manifest, &args.out, "autocorrelation.csv", |path| {
        write_autocorr_csv(path, &ac)
    })?;
    if let Some(seed) = args.shuffle_seed {
        let shuffled = shuffle_intervals(&set, seed);
        let ac_shuffled = autocorrelation(&shuffled, effective_lag)?;
        emit(
            &mut manifest,
            &args.out,
            "autocorrelation_shuffled.csv",
            |path| write_autocorr_csv(path, &ac_shuffled),
        )?;
    }

    let params = AutocorrParams {
        user: target,
        n_intervals: set.len(),
        max_lag: effective_lag,
        requested_max_lag: args.max_lag,
        shuffle_seed: args.shuffle_seed,
        density_fit_range: DEFAULT_USER_FIT_RANGE,
        min_bin_count: DEFAULT_MIN_BIN_COUNT,
    };
    emit(&mut manifest, &args.out, "autocorr_params.json", |path| {
        write_json(path, &params)
    })?;
    finish(&manifest, &args.out)
}

#[derive(Serialize)]
struct SpectrumParams {
    segment_length: usize,
    bins_per_decade: usize,
    fit_band: (f64, f64),
    n_segments: usize,
    series_length: usize,
}

pub fn spectrum(args: &SpectrumArgs) -> Result<()> {
    let (log, digest) = load_trace(&args.input)?;
    fs::create_dir_all(&args.out)?;

    let mut manifest = RunManifest::new("spectrum", Some(digest));
    manifest.set("input", args.input.display());
    manifest.set("segment", args.segment);
    manifest.set("bins_per_decade", args.bins_per_decade);
    manifest.set("fit_lo", args.fit_lo);
    manifest.set("fit_hi", args.fit_hi);

    let series = counts_per_second(&log)?;
    let spectrum = power_spectrum(&series, args.segment, args.bins_per_decade)?;
    emit(&mut manifest, &args.out, "spectrum.csv", |path| {
        write_spectrum_csv(path, &spectrum)
    })?;

    let fit = fit_slope(&spectrum.points(), (args.fit_lo, args.fit_hi))?;
    emit(&mut manifest, &args.out, "spectrum_fit.json", |path| {
        write_json(path, &fit.report())
    })?;

    let params = SpectrumParams {
        segment_length: spectrum.segment_length,
        bins_per_decade: args.bins_per_decade,
        fit_band: (args.fit_lo, args.fit_hi),
        n_segments: spectrum.n_segments,
        series_length: series.len(),
    };
    emit(&mut manifest, &args.out, "spectrum_params.json", |path| {
        write_json(path, &params)
    })?;
    finish(&manifest, &args.out)
}

/// `s_star,gamma_minus_1`.
fn parse_size_model(text: &str) -> Result<SizeModel> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "--sizes expects `s_star,gamma_minus_1`, got `{text}`"
        )));
    }
    let parse = |field: &str| -> Result<f64> {
        field.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("size model field `{field}` is not a number"))
        })
    };
    let model = SizeModel {
        s_star: parse(parts[0])?,
        gamma_minus_1: parse(parts[1])?,
    };
    model.validate()?;
    Ok(model)
}

fn resolve_config(args: &GenerateArgs) -> Result<GeneratorConfig> {
    let mut config = match &args.config {
        Some(path) => serde_json::from_slice(&fs::read(path)?)?,
        None => GeneratorConfig::default(),
    };
    if let Some(streams) = args.streams {
        config.n_streams = streams;
    }
    if let Some(k) = args.k {
        config.tail_exponent = k;
    }
    if let Some(a) = args.a {
        config.lower_cutoff = a;
    }
    if let Some(b) = args.b {
        config.upper_cutoff = b;
    }
    if let Some(warmup_years) = args.warmup_years {
        config.warmup = warmup_years * SECONDS_PER_YEAR;
    }
    if let Some(years) = args.years {
        config.horizon = years * SECONDS_PER_YEAR;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(sizes) = &args.sizes {
        config.size_model = Some(parse_size_model(sizes)?);
    }
    config.validate()?;
    Ok(config)
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let config = resolve_config(args)?;
    let log = simulate(&config)?;

    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut writer = BufWriter::new(fs::File::create(&args.out)?);
    write_log(&log, &mut writer)?;
    writer.flush()?;

    let mut manifest = RunManifest::new("generate", None);
    manifest.set("n_streams", config.n_streams);
    manifest.set("tail_exponent", config.tail_exponent);
    manifest.set("lower_cutoff", config.lower_cutoff);
    manifest.set("upper_cutoff", config.upper_cutoff);
    manifest.set("warmup", config.warmup);
    manifest.set("horizon", config.horizon);
    manifest.set("seed", config.seed);
    manifest.set_optional(
        "size_model",
        &config
            .size_model
            .map(|m| format!("{},{}", m.s_star, m.gamma_minus_1)),
    );
    manifest.set("events", log.len());
    manifest.outputs.push(args.out.display().to_string());

    let manifest_path = manifest_path_for(&args.out);
    write_json(&manifest_path, &manifest)
}

/// `<out>.manifest.json` next to the generated trace.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn join_thresholds(thresholds: &[u64]) -> String {
    thresholds
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
