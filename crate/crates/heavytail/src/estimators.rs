//! Parametric fits for the three shapes that show up in heavy-tailed
//! request traces: a q-exponential (modified power law) size CCDF, a
//! log-normal shape for the rescaled inter-arrival density, and plain
//! power-law slopes in log-log space.
//!
//! All fitters are deterministic given identical inputs. Standard errors
//! come from the Gauss-Newton covariance approximation (or analytic
//! formulas where they exist); a seeded bootstrap is available for the
//! nonlinear fit when samples are small.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distributions::{IntervalSet, SizeCcdf};
use crate::error::{Error, Result};

/// Default abscissa range for the per-user interval power law:
/// one minute to one day.
pub const DEFAULT_USER_FIT_RANGE: (f64, f64) = (60.0, 86_400.0);

/// Uniform serialization of fit results:
/// `{model, params, std_errors, fit_range, residual, n_points}`.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub model: &'static str,
    pub params: BTreeMap<&'static str, f64>,
    pub std_errors: BTreeMap<&'static str, f64>,
    pub fit_range: Option<(f64, f64)>,
    pub residual: f64,
    pub n_points: usize,
}

/// Fitted q-exponential CCDF
/// `N(>S) = prefactor * (1 + S/s_star)^{-gamma_minus_1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QExpFit {
    /// Crossover scale S* in bytes.
    pub s_star: f64,
    /// Tail exponent of the CCDF.
    pub gamma_minus_1: f64,
    /// Count scale at S = 0.
    pub prefactor: f64,
    /// Standard errors of (s_star, gamma_minus_1, prefactor).
    pub std_errors: QExpStdErrors,
    /// Mean squared log residual over the fitted points.
    pub residual: f64,
    /// Number of fitted points after log-spaced subsampling.
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QExpStdErrors {
    pub s_star: f64,
    pub gamma_minus_1: f64,
    pub prefactor: f64,
}

impl QExpFit {
    pub fn report(&self) -> FitReport {
        FitReport {
            model: "q_exponential",
            params: BTreeMap::from([
                ("s_star", self.s_star),
                ("gamma_minus_1", self.gamma_minus_1),
                ("prefactor", self.prefactor),
            ]),
            std_errors: BTreeMap::from([
                ("s_star", self.std_errors.s_star),
                ("gamma_minus_1", self.std_errors.gamma_minus_1),
                ("prefactor", self.std_errors.prefactor),
            ]),
            fit_range: None,
            residual: self.residual,
            n_points: self.n_points,
        }
    }
}

/// Knobs for [`fit_q_exponential_with`].
#[derive(Debug, Clone)]
pub struct QExpFitOptions {
    /// Number of log-spaced CCDF points kept for the fit.
    pub n_subsample: usize,
    /// CCDF points with fewer than this many events above them are
    /// excluded; log counts this small are too noisy to weight equally.
    pub min_count: usize,
    /// Refinement iterations for the crossover-scale search.
    pub max_iters: usize,
    /// Replace the Gauss-Newton standard errors with a seeded bootstrap
    /// over the fitted points.
    pub bootstrap: Option<BootstrapOptions>,
}

#[derive(Debug, Clone, Copy)]
pub struct BootstrapOptions {
    pub replicates: usize,
    pub seed: u64,
}

impl Default for QExpFitOptions {
    fn default() -> Self {
        QExpFitOptions {
            n_subsample: 60,
            min_count: crate::distributions::DEFAULT_MIN_BIN_COUNT,
            max_iters: 200,
            bootstrap: None,
        }
    }
}

/// Fit the q-exponential CCDF with default options.
pub fn fit_q_exponential(ccdf: &SizeCcdf) -> Result<QExpFit> {
    fit_q_exponential_with(ccdf, &QExpFitOptions::default())
}

/// Fit `ln N(>S) = ln prefactor - gamma_minus_1 * ln(1 + S/S*)` by least
/// squares over log-spaced subsampled CCDF points.
///
/// The crossover scale is profiled out: for each candidate S* the other
/// two parameters have a closed-form least-squares solution, and the
/// residual is minimized over S* by a grid scan plus golden-section
/// refinement. Needs at least 10 distinct positive sizes spanning two
/// decades.
pub fn fit_q_exponential_with(ccdf: &SizeCcdf, options: &QExpFitOptions) -> Result<QExpFit> {
    let usable: Vec<(f64, f64)> = ccdf
        .points
        .iter()
        .filter(|&&(s, n)| s > 0 && n >= options.min_count.max(1))
        .map(|&(s, n)| (s as f64, (n as f64).ln()))
        .collect();
    if usable.len() < 10 {
        return Err(Error::InsufficientData(format!(
            "q-exponential fit needs at least 10 usable CCDF points, got {}",
            usable.len()
        )));
    }
    let s_min = usable.first().unwrap().0;
    let s_max = usable.last().unwrap().0;
    if s_max / s_min < 100.0 {
        return Err(Error::DegenerateFit(format!(
            "sizes span {:.2} decades, need at least 2",
            (s_max / s_min).log10()
        )));
    }

    let points = subsample_log_spaced(&usable, options.n_subsample);
    let fitted = profile_fit(&points, s_min, s_max, options.max_iters)?;
    let (c0, g, w, ssr) = fitted;
    let s_star = w.exp();
    let prefactor = c0.exp();
    if !s_star.is_finite() || !g.is_finite() || !prefactor.is_finite() {
        return Err(Error::FitFailure(format!(
            "non-finite optimum (s_star {s_star}, gamma_minus_1 {g}, prefactor {prefactor})"
        )));
    }
    if g <= 0.0 {
        return Err(Error::DegenerateFit(format!(
            "fitted tail exponent {g} is not positive; CCDF does not decay"
        )));
    }

    let n = points.len();
    let std_errors = match &options.bootstrap {
        Some(boot) => bootstrap_errors(&points, s_min, s_max, options.max_iters, boot),
        None => gauss_newton_errors(&points, c0, g, w, ssr),
    };

    Ok(QExpFit {
        s_star,
        gamma_minus_1: g,
        prefactor,
        std_errors,
        residual: ssr / n as f64,
        n_points: n,
    })
}

/// Keep roughly `target` points spread evenly in log size.
fn subsample_log_spaced(points: &[(f64, f64)], target: usize) -> Vec<(f64, f64)> {
    if points.len() <= target || target == 0 {
        return points.to_vec();
    }
    let lo = points.first().unwrap().0.ln();
    let hi = points.last().unwrap().0.ln();
    let mut picked = Vec::with_capacity(target);
    let mut last_idx = usize::MAX;
    for i in 0..target {
        let goal = lo + (hi - lo) * i as f64 / (target - 1) as f64;
        // Points are sorted by size; nearest in log space.
        let idx = match points.binary_search_by(|p| p.0.ln().total_cmp(&goal)) {
            Ok(idx) => idx,
            Err(idx) => {
                if idx == 0 {
                    0
                } else if idx >= points.len() {
                    points.len() - 1
                } else if (points[idx].0.ln() - goal).abs() < (goal - points[idx - 1].0.ln()).abs()
                {
                    idx
                } else {
                    idx - 1
                }
            }
        };
        if idx != last_idx {
            picked.push(points[idx]);
            last_idx = idx;
        }
    }
    picked
}

/// Least-squares (intercept, slope) of `y ~ c0 - c1 * z(w)` for a fixed
/// log crossover scale `w`, plus the residual sum of squares.
fn linear_profile(points: &[(f64, f64)], w: f64) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let s_star = w.exp();
    let mut mean_z = 0.0;
    let mut mean_y = 0.0;
    let zs: Vec<f64> = points
        .iter()
        .map(|&(s, y)| {
            let z = (1.0 + s / s_star).ln();
            mean_z += z;
            mean_y += y;
            z
        })
        .collect();
    mean_z /= n;
    mean_y /= n;
    let mut szz = 0.0;
    let mut szy = 0.0;
    for (&(_, y), &z) in points.iter().zip(&zs) {
        szz += (z - mean_z) * (z - mean_z);
        szy += (z - mean_z) * (y - mean_y);
    }
    let c1 = if szz > 0.0 { -szy / szz } else { 0.0 };
    let c0 = mean_y + c1 * mean_z;
    let ssr: f64 = points
        .iter()
        .zip(&zs)
        .map(|(&(_, y), &z)| {
            let r = y - (c0 - c1 * z);
            r * r
        })
        .sum();
    (c0, c1, ssr)
}

/// Grid scan over ln S* plus golden-section refinement, tracking the
/// best point seen so the residual is nonincreasing in `max_iters`.
fn profile_fit(
    points: &[(f64, f64)],
    s_min: f64,
    s_max: f64,
    max_iters: usize,
) -> Result<(f64, f64, f64, f64)> {
    const GRID: usize = 128;
    let w_lo = (s_min / 100.0).ln();
    let w_hi = (s_max * 100.0).ln();
    let step = (w_hi - w_lo) / (GRID - 1) as f64;

    let mut best = (f64::NAN, f64::NAN, f64::NAN, f64::INFINITY);
    let mut best_idx = 0;
    for i in 0..GRID {
        let w = w_lo + i as f64 * step;
        let (c0, c1, ssr) = linear_profile(points, w);
        if ssr < best.3 {
            best = (c0, c1, w, ssr);
            best_idx = i;
        }
    }

    // Golden-section refinement around the best grid cell.
    let mut a = w_lo + best_idx.saturating_sub(1) as f64 * step;
    let mut b = (w_lo + (best_idx + 1) as f64 * step).min(w_hi);
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = linear_profile(points, x1);
    let mut f2 = linear_profile(points, x2);
    for _ in 0..max_iters {
        if f1.2 < f2.2 {
            if f1.2 < best.3 {
                best = (f1.0, f1.1, x1, f1.2);
            }
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = linear_profile(points, x1);
        } else {
            if f2.2 < best.3 {
                best = (f2.0, f2.1, x2, f2.2);
            }
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = linear_profile(points, x2);
        }
    }
    if !best.3.is_finite() {
        return Err(Error::FitFailure(
            "crossover-scale search failed to produce a finite residual".into(),
        ));
    }
    Ok(best)
}

/// Gauss-Newton covariance in the internal parameters
/// (ln prefactor, gamma_minus_1, ln s_star), transformed back.
fn gauss_newton_errors(points: &[(f64, f64)], c0: f64, g: f64, w: f64, ssr: f64) -> QExpStdErrors {
    let n = points.len();
    let s_star = w.exp();
    let mut jtj = [[0.0f64; 3]; 3];
    for &(s, _) in points {
        let u = s / s_star;
        let row = [-1.0, (1.0 + u).ln(), -g * u / (1.0 + u)];
        for (i, ri) in row.iter().enumerate() {
            for (j, rj) in row.iter().enumerate() {
                jtj[i][j] += ri * rj;
            }
        }
    }
    let sigma_sq = ssr / (n.saturating_sub(3).max(1)) as f64;
    match invert3(&jtj) {
        Some(cov) => QExpStdErrors {
            prefactor: c0.exp() * (sigma_sq * cov[0][0]).sqrt(),
            gamma_minus_1: (sigma_sq * cov[1][1]).sqrt(),
            s_star: s_star * (sigma_sq * cov[2][2]).sqrt(),
        },
        None => QExpStdErrors {
            prefactor: f64::INFINITY,
            gamma_minus_1: f64::INFINITY,
            s_star: f64::INFINITY,
        },
    }
}

fn bootstrap_errors(
    points: &[(f64, f64)],
    s_min: f64,
    s_max: f64,
    max_iters: usize,
    options: &BootstrapOptions,
) -> QExpStdErrors {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(options.seed);
    let mut samples: Vec<[f64; 3]> = Vec::with_capacity(options.replicates);
    for _ in 0..options.replicates {
        let mut resampled: Vec<(f64, f64)> = (0..points.len())
            .map(|_| points[rng.random_range(0..points.len())])
            .collect();
        resampled.sort_by(|a, b| a.0.total_cmp(&b.0));
        if let Ok((c0, g, w, _)) = profile_fit(&resampled, s_min, s_max, max_iters) {
            samples.push([w.exp(), g, c0.exp()]);
        }
    }
    let sd = |idx: usize| -> f64 {
        let n = samples.len() as f64;
        if n < 2.0 {
            return f64::INFINITY;
        }
        let mean = samples.iter().map(|s| s[idx]).sum::<f64>() / n;
        (samples.iter().map(|s| (s[idx] - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    QExpStdErrors {
        s_star: sd(0),
        gamma_minus_1: sd(1),
        prefactor: sd(2),
    }
}

/// Invert a symmetric 3x3 matrix by Gaussian elimination with partial
/// pivoting. `None` if singular.
fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut a = *m;
    let mut inv = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col];
        for j in 0..3 {
            a[col][j] /= scale;
            inv[col][j] /= scale;
        }
        for row in 0..3 {
            if row == col {
                continue;
            }
            let factor = a[row][col];
            for j in 0..3 {
                a[row][j] -= factor * a[col][j];
                inv[row][j] -= factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Maximum-likelihood log-normal fit of positive samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LogNormalFit {
    /// Mean of ln x.
    pub m: f64,
    /// Population standard deviation of ln x.
    pub sigma: f64,
    /// Standard errors: sigma/sqrt(n) for m, sigma/sqrt(2n) for sigma.
    pub std_errors: LogNormalStdErrors,
    /// Mean squared deviation of ln x about m (equals sigma^2).
    pub residual: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogNormalStdErrors {
    pub m: f64,
    pub sigma: f64,
}

impl LogNormalFit {
    pub fn report(&self) -> FitReport {
        FitReport {
            model: "log_normal",
            params: BTreeMap::from([("m", self.m), ("sigma", self.sigma)]),
            std_errors: BTreeMap::from([
                ("m", self.std_errors.m),
                ("sigma", self.std_errors.sigma),
            ]),
            fit_range: None,
            residual: self.residual,
            n_points: self.n_samples,
        }
    }

    /// The fitted density g(x) at x > 0.
    pub fn density(&self, x: f64) -> f64 {
        let z = (x.ln() - self.m) / self.sigma;
        (-0.5 * z * z).exp() / ((2.0 * std::f64::consts::PI).sqrt() * self.sigma * x)
    }
}

/// Fit a log-normal to (typically rescaled) interval samples by maximum
/// likelihood: m and sigma are the mean and population standard
/// deviation of ln x. Needs at least 100 positive samples and nonzero
/// variance.
pub fn fit_lognormal(samples: &IntervalSet) -> Result<LogNormalFit> {
    let n = samples.len();
    if n < 100 {
        return Err(Error::InsufficientData(format!(
            "log-normal fit needs at least 100 samples, got {n}"
        )));
    }
    if let Some(bad) = samples.intervals.iter().find(|&&x| x.is_nan() || x <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "log-normal fit requires positive samples, found {bad}"
        )));
    }
    let logs: Vec<f64> = samples.intervals.iter().map(|&x| x.ln()).collect();
    let m = logs.iter().sum::<f64>() / n as f64;
    let variance = logs.iter().map(|&l| (l - m) * (l - m)).sum::<f64>() / n as f64;
    let sigma = variance.sqrt();
    if sigma <= 1e-12 * m.abs().max(1.0) {
        return Err(Error::DegenerateFit(format!(
            "sigma estimate {sigma} is indistinguishable from zero"
        )));
    }
    Ok(LogNormalFit {
        m,
        sigma,
        std_errors: LogNormalStdErrors {
            m: sigma / (n as f64).sqrt(),
            sigma: sigma / (2.0 * n as f64).sqrt(),
        },
        residual: variance,
        n_samples: n,
    })
}

/// Power-law slope fitted in log-log space.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    /// Exponent alpha with the sign flipped so `y ~ x^{-alpha}` reports
    /// a positive alpha.
    pub exponent: f64,
    /// Intercept of the regression of ln y on ln x.
    pub intercept: f64,
    /// Abscissa range the fit was restricted to.
    pub fit_range: (f64, f64),
    /// Standard error of the exponent.
    pub std_error: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// Mean squared log residual.
    pub residual: f64,
}

impl SlopeFit {
    pub fn report(&self) -> FitReport {
        FitReport {
            model: "power_law_slope",
            params: BTreeMap::from([("exponent", self.exponent), ("intercept", self.intercept)]),
            std_errors: BTreeMap::from([("exponent", self.std_error)]),
            fit_range: Some(self.fit_range),
            residual: self.residual,
            n_points: self.n_points,
        }
    }
}

/// Ordinary least squares of ln y on ln x over points with
/// `lo <= x <= hi`; the exponent is the negated slope. Points with
/// nonpositive x or y are skipped (their logarithm is undefined); at
/// least 5 usable points are required.
pub fn fit_slope(points: &[(f64, f64)], range: (f64, f64)) -> Result<SlopeFit> {
    let (lo, hi) = range;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidParameter(format!(
            "fit range [{lo}, {hi}] is empty"
        )));
    }
    let data: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0 && x >= lo && x <= hi)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = data.len();
    if n < 5 {
        return Err(Error::InsufficientData(format!(
            "slope fit needs at least 5 in-range points, got {n}"
        )));
    }
    let mean_x = data.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let mean_y = data.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for &(x, y) in &data {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateFit(
            "all in-range points share one abscissa".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ssr: f64 = data
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    let std_error = if n > 2 {
        (ssr / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(SlopeFit {
        exponent: -slope,
        intercept,
        fit_range: range,
        std_error,
        r_squared,
        n_points: n,
        residual: ssr / n as f64,
    })
}
