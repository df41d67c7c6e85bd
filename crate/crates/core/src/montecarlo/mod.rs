//! Monte Carlo experiments: CLT checks for `Q_n` and the local Whittle
//! statistic, empirical size tables for the change-point test, density
//! samples, and the bias rate of `Q_n`.
//!
//! Replication `r` of sample size `N` in experiment `name` draws from stream
//! `replication_stream(mix64(fnv1a(name) ^ mix64(N)), r)` of the master seed,
//! so outputs do not depend on the number of worker threads. Within one
//! replication the same simulated path is reused for every bandwidth rule
//! and every (Δ, θ) design.

pub mod config;
pub mod output;
pub mod stats;

use rayon::prelude::*;

use crate::changepoint::{cusum_estimate, decide, residualize};
use crate::error::{LrvError, Result};
use crate::simulate::rng::{mix64, name_id};
use crate::simulate::{least_squares_slope, replication_stream, simulate_with_rng, stream_rng, theoretical_f0, ProcessSpec};
use crate::spectral::{cosine_weights, periodogram, LrvPath, PeriodogramOrdinates};
use crate::whittle::{fit_ordinates, WhittleOptions};
use crate::{lrv_smoothed_periodogram, TimeSeries};

pub use config::{Config, DensityStatistic, ExperimentConfig, ExperimentKind, MRule, SizeParams};
pub use output::{render, run_config, write_outputs, ExperimentOutput};
pub use stats::{histogram, ks_distance_normal, summarize, Histogram, Summary, HISTOGRAM_BINS};

/// Bandwidth exponents at or above this violate the rate condition of the
/// Whittle CLT.
pub const WHITTLE_RATE_LIMIT: f64 = 0.8;
/// Suggested replication count for bias estimates.
pub const BIAS_MIN_REPS: usize = 10_000;

/// Stream id for replication `rep` at sample size `n` of experiment `name`.
pub fn sample_stream(name: &str, n: usize, rep: u64) -> u64 {
    replication_stream(mix64(name_id(name) ^ mix64(n as u64)), rep)
}

fn simulate_rep(cfg: &ExperimentConfig, n: usize, rep: u64) -> Result<TimeSeries<f64>> {
    let mut rng = stream_rng(cfg.master_seed, sample_stream(&cfg.name, n, rep));
    simulate_with_rng(&cfg.process, n, &mut rng)
}

/// Runs `per_rep` for every replication at sample size `n`, in parallel,
/// returning results in replication order.
fn replicate<R: Send>(
    cfg: &ExperimentConfig,
    n: usize,
    per_rep: impl Fn(TimeSeries<f64>) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    (0..cfg.reps as u64)
        .into_par_iter()
        .map(|rep| per_rep(simulate_rep(cfg, n, rep)?))
        .collect()
}

fn require_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    cfg.validate()?;
    if cfg.kind != kind {
        return Err(LrvError::Config(format!(
            "experiment `{}` has kind {}, expected {}",
            cfg.name,
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    Ok(())
}

fn bandwidths(cfg: &ExperimentConfig, n: usize) -> Result<Vec<usize>> {
    cfg.m_rules.iter().map(|r| r.bandwidth(n)).collect()
}

/// Splits per-replication rows (one value per rule) into per-rule columns.
fn columns(rows: Vec<Vec<f64>>, width: usize) -> Vec<Vec<f64>> {
    let mut cols = vec![Vec::with_capacity(rows.len()); width];
    for row in rows {
        for (c, v) in cols.iter_mut().zip(row) {
            c.push(v);
        }
    }
    cols
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleCell {
    pub n: usize,
    pub rule: MRule,
    pub m: usize,
    pub samples: Vec<f64>,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CltResult {
    pub cells: Vec<SampleCell>,
    pub warnings: Vec<String>,
}

/// `√m (Q_n - f(0)) / f(0)` per replication, for every `(N, m-rule)`.
pub fn run_clt_qn(cfg: &ExperimentConfig) -> Result<CltResult> {
    require_kind(cfg, ExperimentKind::CltQn)?;
    let f0 = theoretical_f0(&cfg.process)?;
    let mut cells = Vec::new();
    for &n in &cfg.n_values {
        let ms = bandwidths(cfg, n)?;
        let m_max = *ms.iter().max().unwrap_or(&1);
        let rows = replicate(cfg, n, |x| {
            let ords = periodogram(&x, m_max)?.ordinates;
            Ok(ms
                .iter()
                .map(|&m| {
                    let q = ords[..m].iter().sum::<f64>() / m as f64;
                    (m as f64).sqrt() * (q - f0) / f0
                })
                .collect())
        })?;
        for ((rule, &m), samples) in cfg.m_rules.iter().zip(&ms).zip(columns(rows, ms.len())) {
            cells.push(SampleCell {
                n,
                rule: *rule,
                m,
                summary: summarize(&samples),
                samples,
            });
        }
    }
    Ok(CltResult { cells, warnings: Vec::new() })
}

/// `2√m (Ĥ - 1/2)` on the raw simulated path, for every `(N, m-rule)`.
pub fn run_clt_whittle(cfg: &ExperimentConfig) -> Result<CltResult> {
    require_kind(cfg, ExperimentKind::CltWhittle)?;
    let mut warnings = Vec::new();
    let options = WhittleOptions::with_bounds(cfg.bounds.0, cfg.bounds.1);
    let mut cells = Vec::new();
    for &n in &cfg.n_values {
        let ms = bandwidths(cfg, n)?;
        for (rule, &m) in cfg.m_rules.iter().zip(&ms) {
            let effective = (m as f64).ln() / (n as f64).ln();
            if effective >= WHITTLE_RATE_LIMIT {
                warnings.push(format!(
                    "N={n}, m={m} ({rule}): bandwidth exponent {effective:.3} >= {WHITTLE_RATE_LIMIT}; \
                     the rate condition m^5 (log m)^2 / N^4 -> 0 fails and the normal limit is not guaranteed"
                ));
            }
        }
        let m_max = *ms.iter().max().unwrap_or(&1);
        let rows = replicate(cfg, n, |x| {
            let ords = periodogram(&x, m_max)?.ordinates;
            ms.iter()
                .map(|&m| {
                    let sub = PeriodogramOrdinates::from_parts(n, ords[..m].to_vec())?;
                    Ok(fit_ordinates(&sub, &options)?.normalized)
                })
                .collect()
        })?;
        for ((rule, &m), samples) in cfg.m_rules.iter().zip(&ms).zip(columns(rows, ms.len())) {
            cells.push(SampleCell {
                n,
                rule: *rule,
                m,
                summary: summarize(&samples),
                samples,
            });
        }
    }
    Ok(CltResult { cells, warnings })
}

/// Adds `Δ` to observations after `n* = ⌊Nθ⌋`.
pub fn apply_level_shift(values: &[f64], delta: f64, theta: f64) -> Vec<f64> {
    let n_star = break_index(values.len(), theta);
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| if i >= n_star { v + delta } else { v })
        .collect()
}

/// `⌊Nθ⌋`, robust to `Nθ` landing just below an integer in floating point.
pub fn break_index(n: usize, theta: f64) -> usize {
    ((n as f64 * theta) * (1.0 + 1e-12)).floor() as usize
}

/// `T^(R)` for each bandwidth in `ms`, sharing the CUSUM step and the
/// periodogram of the residuals.
pub fn residual_statistics(x: &TimeSeries<f64>, ms: &[usize], options: &WhittleOptions) -> Result<Vec<f64>> {
    let cp = cusum_estimate(x)?;
    let r = residualize(x, cp.n_hat)?;
    let m_max = *ms.iter().max().unwrap_or(&1);
    let ords = periodogram(&r, m_max)?.ordinates;
    ms.iter()
        .map(|&m| {
            let sub = PeriodogramOrdinates::from_parts(x.len(), ords[..m].to_vec())?;
            Ok(fit_ordinates(&sub, options)?.normalized)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeCell {
    pub delta: f64,
    pub theta: f64,
    pub rule: MRule,
    pub n: usize,
    pub m: usize,
    pub alpha: f64,
    pub rejections: usize,
    pub reps: usize,
    /// Rejection frequency in percent.
    pub percent: f64,
    /// `100 √(p̂(1-p̂)/reps)`.
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeTable {
    pub cells: Vec<SizeCell>,
    pub reps: usize,
}

impl SizeTable {
    pub fn cell(&self, delta: f64, theta: f64, rule: MRule, n: usize, alpha: f64) -> Option<&SizeCell> {
        self.cells
            .iter()
            .find(|c| c.delta == delta && c.theta == theta && c.rule == rule && c.n == n && c.alpha == alpha)
    }
}

/// Empirical size of the residual test under a single level shift.
pub fn run_size_table(cfg: &ExperimentConfig) -> Result<SizeTable> {
    require_kind(cfg, ExperimentKind::SizeTable)?;
    let size = cfg.size.as_ref().expect("validated");
    let options = WhittleOptions::with_bounds(cfg.bounds.0, cfg.bounds.1);
    let designs: Vec<(f64, f64)> = size
        .deltas
        .iter()
        .flat_map(|&d| size.thetas.iter().map(move |&t| (d, t)))
        .collect();
    let mut cells = Vec::new();
    for &n in &cfg.n_values {
        let ms = bandwidths(cfg, n)?;
        let rows = replicate(cfg, n, |r| {
            let mut out = Vec::with_capacity(designs.len() * ms.len());
            for &(delta, theta) in &designs {
                let x = TimeSeries::new(apply_level_shift(r.values(), delta, theta))?;
                out.extend(residual_statistics(&x, &ms, &options)?);
            }
            Ok(out)
        })?;
        let cols = columns(rows, designs.len() * ms.len());
        for (d_idx, &(delta, theta)) in designs.iter().enumerate() {
            for (m_idx, (rule, &m)) in cfg.m_rules.iter().zip(&ms).enumerate() {
                let stats = &cols[d_idx * ms.len() + m_idx];
                for &alpha in &size.alphas {
                    let mut rejections = 0;
                    for &t in stats {
                        if decide(t, alpha)?.1 {
                            rejections += 1;
                        }
                    }
                    let p = rejections as f64 / cfg.reps as f64;
                    cells.push(SizeCell {
                        delta,
                        theta,
                        rule: *rule,
                        n,
                        m,
                        alpha,
                        rejections,
                        reps: cfg.reps,
                        percent: 100.0 * p,
                        se: 100.0 * (p * (1.0 - p) / cfg.reps as f64).sqrt(),
                    });
                }
            }
        }
    }
    Ok(SizeTable { cells, reps: cfg.reps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCell {
    pub cell: SampleCell,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityResult {
    pub statistic: DensityStatistic,
    /// `(Δ, θ)` of the level shift used for the residual statistic.
    pub shift: (f64, f64),
    pub cells: Vec<DensityCell>,
}

/// Raw samples of `T^(R)` (or of the normalized Whittle statistic) with a
/// 64-bin density histogram per `(N, m-rule)`.
pub fn run_density_samples(cfg: &ExperimentConfig) -> Result<DensityResult> {
    if cfg.reps == 0 {
        return Err(LrvError::InsufficientReps { reps: 0, min: 1 });
    }
    require_kind(cfg, ExperimentKind::DensitySamples)?;
    let options = WhittleOptions::with_bounds(cfg.bounds.0, cfg.bounds.1);
    let (delta, theta) = cfg.density_shift();
    let mut cells = Vec::new();
    for &n in &cfg.n_values {
        let ms = bandwidths(cfg, n)?;
        let rows = replicate(cfg, n, |r| match cfg.statistic {
            DensityStatistic::Residual => {
                let x = TimeSeries::new(apply_level_shift(r.values(), delta, theta))?;
                residual_statistics(&x, &ms, &options)
            }
            DensityStatistic::Whittle => {
                let m_max = *ms.iter().max().unwrap_or(&1);
                let ords = periodogram(&r, m_max)?.ordinates;
                ms.iter()
                    .map(|&m| Ok(fit_ordinates(&PeriodogramOrdinates::from_parts(n, ords[..m].to_vec())?, &options)?.normalized))
                    .collect()
            }
        })?;
        for ((rule, &m), samples) in cfg.m_rules.iter().zip(&ms).zip(columns(rows, ms.len())) {
            let histogram = histogram(&samples, HISTOGRAM_BINS)?;
            cells.push(DensityCell {
                cell: SampleCell {
                    n,
                    rule: *rule,
                    m,
                    summary: summarize(&samples),
                    samples,
                },
                histogram,
            });
        }
    }
    Ok(DensityResult {
        statistic: cfg.statistic,
        shift: (delta, theta),
        cells,
    })
}

/// `E Q_n = (1/2π) Σ_{|h|<n} a_{n,h} (1 - |h|/n) γ(h)` for a mean-zero
/// process with known autocovariances.
pub fn expected_qn(spec: &ProcessSpec, n: usize, m: usize) -> Result<f64> {
    let a = cosine_weights::<f64>(n, m)?;
    let gamma: Vec<f64> = match spec {
        ProcessSpec::Linear { variance, .. } => {
            let psi = spec.linear_coefficients().unwrap_or_default();
            (0..psi.len().min(n))
                .map(|h| variance * psi.iter().zip(&psi[h..]).map(|(x, y)| x * y).sum::<f64>())
                .collect()
        }
        _ => vec![spec.stationary_variance()?],
    };
    let mut s = gamma[0];
    for (h, g) in gamma.iter().enumerate().skip(1) {
        s += 2.0 * a.at(h as i64) * (1.0 - h as f64 / n as f64) * g;
    }
    Ok(s / std::f64::consts::TAU)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasRow {
    pub n: usize,
    pub rule: MRule,
    pub m: usize,
    pub f0: f64,
    pub exact_mean: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
}

impl BiasRow {
    pub fn ratio(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn exact_bias(&self) -> f64 {
        self.exact_mean - self.f0
    }

    pub fn mc_bias(&self) -> f64 {
        self.mc_mean - self.f0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasSlope {
    pub n: usize,
    /// Slope of `log|E Q_n - f(0)|` on `log(m/N)`; `None` when the bias
    /// vanishes.
    pub exact: Option<f64>,
    pub mc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasTable {
    pub rows: Vec<BiasRow>,
    pub slopes: Vec<BiasSlope>,
    pub warnings: Vec<String>,
}

/// Bias of `Q_n` at each `(N, m)`: exact from the autocovariances and as a
/// Monte Carlo average.
pub fn check_bias_rate(cfg: &ExperimentConfig) -> Result<BiasTable> {
    require_kind(cfg, ExperimentKind::BiasRate)?;
    let mut warnings = Vec::new();
    if cfg.reps < BIAS_MIN_REPS {
        warnings.push(format!(
            "{} replications; Monte Carlo bias estimates need about {BIAS_MIN_REPS} to resolve small biases",
            cfg.reps
        ));
    }
    let f0 = theoretical_f0(&cfg.process)?;
    let mut rows = Vec::new();
    let mut slopes = Vec::new();
    for &n in &cfg.n_values {
        let ms = bandwidths(cfg, n)?;
        let per_rep = replicate(cfg, n, |x| {
            ms.iter()
                .map(|&m| Ok(lrv_smoothed_periodogram(&x, m, LrvPath::FrequencyAverage)?.q_n))
                .collect()
        })?;
        let start = rows.len();
        for ((rule, &m), qs) in cfg.m_rules.iter().zip(&ms).zip(columns(per_rep, ms.len())) {
            let s = summarize(&qs);
            rows.push(BiasRow {
                n,
                rule: *rule,
                m,
                f0,
                exact_mean: expected_qn(&cfg.process, n, m)?,
                mc_mean: s.mean,
                mc_se: s.se().unwrap_or(f64::NAN),
            });
        }
        let here = &rows[start..];
        let fit = |bias: &dyn Fn(&BiasRow) -> f64| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = here
                .iter()
                .filter(|r| bias(r).abs() > 1e-12 * f0)
                .map(|r| (r.ratio().ln(), bias(r).abs().ln()))
                .unzip();
            least_squares_slope(&xs, &ys)
        };
        slopes.push(BiasSlope {
            n,
            exact: fit(&BiasRow::exact_bias),
            mc: fit(&BiasRow::mc_bias),
        });
    }
    Ok(BiasTable { rows, slopes, warnings })
}
