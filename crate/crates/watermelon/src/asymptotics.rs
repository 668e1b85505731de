//! Mehta's integral and the large-`t` power laws of the chain correlators.
//!
//! Each report pairs the predicted leading term with an empirical log-log
//! fit of the exact correlator from [`crate::xx0`].

use std::f64::consts::PI;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::partitions::{macmahon_count, StrictPartition};
use crate::schur::ssyt_count_formula;
use crate::xx0::{self, ChainConfig};

/// Above this size the factorials are accumulated as logarithms.
const LOG_SPACE_FROM: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MehtaIntegral {
    pub n: usize,
    /// `prod_{l<N} l! / sqrt(2 pi)`; `inf` once it overflows.
    pub value: f64,
    pub log_value: f64,
    /// `(N^2/2) log N - 3 N^2 / 4`.
    pub barnes_estimate: f64,
    /// `log_value - barnes_estimate`.
    pub difference: f64,
}

/// `I_N = prod_{l=0}^{N-1} l! / (2 pi)^(1/2)` with its logarithm and the
/// large-`N` estimate.
pub fn mehta_integral(n: usize) -> Result<MehtaIntegral> {
    if n == 0 {
        return Err(Error::InvalidParameter("Mehta's integral needs N >= 1".into()));
    }
    let half_log_2pi = 0.5 * (2.0 * PI).ln();
    let (value, log_value) = if n <= LOG_SPACE_FROM {
        let mut v = 1.0f64;
        let mut fact = 1.0f64;
        for l in 0..n {
            if l > 0 {
                fact *= l as f64;
            }
            v *= fact / (2.0 * PI).sqrt();
        }
        (v, v.ln())
    } else {
        let mut log_fact = 0.0f64;
        let mut acc = 0.0f64;
        for l in 0..n {
            if l > 0 {
                log_fact += (l as f64).ln();
            }
            acc += log_fact - half_log_2pi;
        }
        (acc.exp(), acc)
    };
    let nf = n as f64;
    let barnes_estimate = nf * nf / 2.0 * nf.ln() - 0.75 * nf * nf;
    Ok(MehtaIntegral {
        n,
        value,
        log_value,
        barnes_estimate,
        difference: log_value - barnes_estimate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoteKind {
    Amplitude,
    Persistence,
    TwoTime,
    Autocorr,
}

/// Inputs of [`leading_asymptote`]. Fields a kind does not use are ignored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteParams {
    /// Largest site index.
    pub m: usize,
    /// Particle number.
    pub n: usize,
    /// Final and initial sites of the amplitudes; default to `0..N`.
    #[serde(default)]
    pub j: Vec<usize>,
    #[serde(default)]
    pub l: Vec<usize>,
    /// Domain-wall size `n` of the persistence and auto-correlation.
    #[serde(default)]
    pub wall: usize,
    /// Projector bound `m` of the two-time quantities.
    #[serde(default)]
    pub mproj: usize,
    /// Explicit `(t_min, t_max)`; otherwise `10 .. min((M+1)/2, 80)`.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
    /// Grid size of the fit.
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_budget")]
    pub budget: u128,
}

fn default_points() -> usize {
    12
}

fn default_budget() -> u128 {
    xx0::DEFAULT_BUDGET
}

impl AsymptoteParams {
    pub fn new(m: usize, n: usize) -> Self {
        AsymptoteParams {
            m,
            n,
            j: Vec::new(),
            l: Vec::new(),
            wall: 0,
            mproj: 0,
            window: None,
            points: default_points(),
            budget: default_budget(),
        }
    }

    pub fn with_window(mut self, t_min: f64, t_max: f64) -> Self {
        self.window = Some((t_min, t_max));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoteReport {
    pub kind: AsymptoteKind,
    /// Coefficient of the predicted power law.
    pub predicted_value: f64,
    /// Power of `t` (or of `t1 t2` for the two-time quantities).
    pub predicted_exponent: f64,
    /// Negated least-squares slope of `log|value|` against `log t` (or
    /// `log t1 t2`).
    pub fitted_exponent: f64,
    /// `|value t^p - A| / A` at the end of the window, `p` predicted.
    pub relative_amplitude_error: f64,
    /// `value t^p / A` at the end of the window.
    pub amplitude_ratio: f64,
    pub fit_window: (f64, f64),
    /// Grid points `(t, value)`; two-time kinds use `t1 = t2 = t`.
    pub samples: Vec<(f64, f64)>,
}

/// Automatic window `t_min = 10`, `t_max = min((M+1)/2, 80)`.
pub fn default_window(m: usize) -> (f64, f64) {
    (10.0, (0.5 * (m as f64 + 1.0)).min(80.0))
}

/// `points` log-spaced times spanning the window.
pub fn log_grid(window: (f64, f64), points: usize) -> Vec<f64> {
    let (a, b) = (window.0.ln(), window.1.ln());
    let p = points.max(2);
    (0..p)
        .map(|i| (a + (b - a) * i as f64 / (p - 1) as f64).exp())
        .collect()
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

fn count_f64(l: usize, n: usize, k: usize) -> f64 {
    macmahon_count(l, n, k).to_f64().unwrap_or(f64::INFINITY)
}

// S_lambda(1_N) for the partition behind the sites.
fn dimension(sites: &[usize]) -> Result<f64> {
    let lambda = StrictPartition::from_sites(sites)?.to_partition();
    Ok(ssyt_count_formula(lambda.parts(), sites.len())
        .to_f64()
        .unwrap_or(f64::INFINITY))
}

fn sites_or_wall(s: &[usize], n: usize) -> Vec<usize> {
    if s.is_empty() {
        (0..n).collect()
    } else {
        s.to_vec()
    }
}

/// Predicted coefficient and exponent of the leading large-`t` term.
pub fn predicted(kind: AsymptoteKind, p: &AsymptoteParams) -> Result<(f64, f64)> {
    let n = p.n;
    if n == 0 || n > p.m + 1 {
        return Err(Error::InvalidParameter(format!("N = {n} on M = {}", p.m)));
    }
    let mehta = mehta_integral(n)?.value;
    let exponent = (n * n) as f64 / 2.0;
    let calm = p.m + 1 - n;
    let scale = (2.0 * PI / (p.m as f64 + 1.0)).powi((n * n) as i32);
    let wall_count = || -> Result<f64> {
        if p.wall > n {
            return Err(Error::InvalidParameter(format!("wall {} exceeds N = {n}", p.wall)));
        }
        Ok(count_f64(n - p.wall, n, calm))
    };
    let proj_count = || -> Result<f64> {
        if p.mproj > calm {
            return Err(Error::InvalidParameter(format!(
                "projector m = {} exceeds M - N + 1",
                p.mproj
            )));
        }
        Ok(count_f64(n, n, calm - p.mproj))
    };
    let dims = || -> Result<f64> { Ok(dimension(&sites_or_wall(&p.j, n))? * dimension(&sites_or_wall(&p.l, n))?) };
    let value = match kind {
        AsymptoteKind::Amplitude => dims()? * mehta,
        AsymptoteKind::Persistence => wall_count()?.powi(2) * scale * mehta.powi(3),
        AsymptoteKind::TwoTime => dims()? * proj_count()? * mehta.powi(2),
        AsymptoteKind::Autocorr => proj_count()? * wall_count()?.powi(2) * scale * mehta.powi(4),
    };
    Ok((value, exponent))
}

fn exact(kind: AsymptoteKind, p: &AsymptoteParams, t: f64) -> Result<f64> {
    let cfg = ChainConfig::new(p.m, p.n)?;
    let (j, l) = (sites_or_wall(&p.j, p.n), sites_or_wall(&p.l, p.n));
    Ok(match kind {
        AsymptoteKind::Amplitude => xx0::amplitude(&j, &l, t, p.m)?.value.norm(),
        AsymptoteKind::Persistence => xx0::persistence(&cfg, p.wall, t, p.budget)?.value,
        AsymptoteKind::TwoTime => xx0::two_time_amplitude(&j, &l, t, t, p.mproj, p.m)?.value.norm(),
        AsymptoteKind::Autocorr => xx0::autocorrelation(&cfg, p.wall, p.mproj, t, t, p.budget)?.value,
    })
}

/// Predict the leading power law of `kind` and fit the exact correlator on a
/// log-spaced grid inside the window.
///
/// Fails with [`Error::RegimeTooSmall`] when the automatic window is empty
/// because the chain is too short, or an explicit window is not increasing.
pub fn leading_asymptote(kind: AsymptoteKind, p: &AsymptoteParams) -> Result<AsymptoteReport> {
    let (predicted_value, predicted_exponent) = predicted(kind, p)?;
    let window = p.window.unwrap_or_else(|| default_window(p.m));
    if !(window.0 > 0.0 && window.1 > window.0) {
        return Err(Error::RegimeTooSmall);
    }
    let grid = log_grid(window, p.points);
    let values = par::map_indexed(grid.len(), |i| exact(kind, p, grid[i]));
    let mut samples = Vec::with_capacity(grid.len());
    for (t, v) in grid.iter().zip(values) {
        samples.push((*t, v?));
    }
    // Two-time kinds decay in the product t1 t2 = t^2.
    let time_power = match kind {
        AsymptoteKind::Amplitude | AsymptoteKind::Persistence => 1.0,
        AsymptoteKind::TwoTime | AsymptoteKind::Autocorr => 2.0,
    };
    let xs: Vec<f64> = samples.iter().map(|(t, _)| time_power * t.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| v.abs().ln()).collect();
    let (slope, _) = least_squares(&xs, &ys);
    let (t_end, v_end) = *samples.last().expect("grid has at least two points");
    let scaled = v_end.abs() * t_end.powf(time_power * predicted_exponent);
    Ok(AsymptoteReport {
        kind,
        predicted_value,
        predicted_exponent,
        fitted_exponent: -slope,
        relative_amplitude_error: (scaled - predicted_value).abs() / predicted_value,
        amplitude_ratio: scaled / predicted_value,
        fit_window: window,
        samples,
    })
}
