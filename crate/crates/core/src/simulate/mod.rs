//! Seeded generators for Bernoulli shifts `X_t = g(ε_t, ε_{t-1}, ...)`.
//!
//! Four families are supported:
//!
//! - iid Gaussian noise,
//! - linear processes `X_t = σ Σ_j ψ_j ε_{t-j}` with either an explicit
//!   finite filter or `ψ_j = (j+1)^{-d}`, `d > 1`,
//! - GARCH(1,1): `r_t = σ_t ε_t`, `σ_t² = α0 + α1 r_{t-1}² + β1 σ_{t-1}²`,
//! - stochastic volatility: `r_t = exp(x_t/2) ε_t`, `x_t = α + φ x_{t-1} + w_t`.
//!
//! All innovations are standard normal. A path is a deterministic function
//! of a window of [`Shock`]s, which is what makes the coupled constructions
//! in [`coupling`] possible: the same window with some shocks swapped for
//! independent copies gives `X_{t,{0}}` or `X_t^{(m)}`.

pub mod coupling;
pub mod rng;

use rand::Rng;

use crate::error::{LrvError, Result};
use crate::scalar::CompensatedSum;
use crate::series::TimeSeries;

pub use coupling::{coupled_paths, least_squares_slope, CouplingDiagnostics};
pub use rng::{replication_stream, stream_rng, StreamRng};

/// Pre-sample steps discarded for GARCH and SV paths.
pub const BURN_IN: usize = 2000;
/// Relative ℓ² tail mass at which `ψ_j = (j+1)^{-d}` is truncated.
pub const LINEAR_TAIL_TOL: f64 = 1e-8;
pub const LINEAR_MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LinearFilter {
    /// `ψ_j = (j+1)^{-d}`.
    PowerDecay { d: f64 },
    /// `ψ_0, ..., ψ_{J-1}`.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProcessSpec {
    Iid { variance: f64 },
    Linear { filter: LinearFilter, variance: f64 },
    Garch11 { alpha0: f64, alpha1: f64, beta1: f64 },
    StochVol { alpha: f64, phi: f64, sigma_w2: f64 },
}

/// Innovations driving one time step. `aux` is only used by the SV model.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Shock {
    pub eps: f64,
    pub aux: f64,
}

impl ProcessSpec {
    pub fn iid(variance: f64) -> Self {
        ProcessSpec::Iid { variance }
    }

    pub fn power_decay(d: f64, variance: f64) -> Self {
        ProcessSpec::Linear {
            filter: LinearFilter::PowerDecay { d },
            variance,
        }
    }

    pub fn moving_average(coefficients: Vec<f64>, variance: f64) -> Self {
        ProcessSpec::Linear {
            filter: LinearFilter::Explicit(coefficients),
            variance,
        }
    }

    pub fn garch11(alpha0: f64, alpha1: f64, beta1: f64) -> Self {
        ProcessSpec::Garch11 { alpha0, alpha1, beta1 }
    }

    pub fn stoch_vol(alpha: f64, phi: f64, sigma_w2: f64) -> Self {
        ProcessSpec::StochVol { alpha, phi, sigma_w2 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProcessSpec::Iid { .. } => "iid",
            ProcessSpec::Linear { .. } => "linear",
            ProcessSpec::Garch11 { .. } => "garch11",
            ProcessSpec::StochVol { .. } => "sv",
        }
    }

    /// Human-readable parameter list, used in output headers.
    pub fn describe(&self) -> String {
        match self {
            ProcessSpec::Iid { variance } => format!("iid(variance={variance})"),
            ProcessSpec::Linear { filter, variance } => match filter {
                LinearFilter::PowerDecay { d } => format!("linear(psi=(j+1)^-{d}, variance={variance})"),
                LinearFilter::Explicit(c) => format!("linear(psi={c:?}, variance={variance})"),
            },
            ProcessSpec::Garch11 { alpha0, alpha1, beta1 } => {
                format!("garch11(alpha0={alpha0}, alpha1={alpha1}, beta1={beta1})")
            }
            ProcessSpec::StochVol { alpha, phi, sigma_w2 } => {
                format!("sv(alpha={alpha}, phi={phi}, sigma_w2={sigma_w2})")
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LrvError::InvalidSpec(msg));
        match self {
            ProcessSpec::Iid { variance } => {
                if !(variance.is_finite() && *variance > 0.0) {
                    return bad(format!("iid variance must be positive, got {variance}"));
                }
            }
            ProcessSpec::Linear { filter, variance } => {
                if !(variance.is_finite() && *variance > 0.0) {
                    return bad(format!("innovation variance must be positive, got {variance}"));
                }
                match filter {
                    LinearFilter::PowerDecay { d } => {
                        if !(d.is_finite() && *d > 1.0) {
                            return bad(format!("decay exponent d must exceed 1, got {d}"));
                        }
                    }
                    LinearFilter::Explicit(c) => {
                        if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                            return bad("explicit filter must be non-empty and finite".into());
                        }
                    }
                }
            }
            ProcessSpec::Garch11 { alpha0, alpha1, beta1 } => {
                if !(alpha0.is_finite() && *alpha0 > 0.0) {
                    return bad(format!("alpha0 must be positive, got {alpha0}"));
                }
                if !(alpha1.is_finite() && *alpha1 >= 0.0 && beta1.is_finite() && *beta1 >= 0.0) {
                    return bad("alpha1 and beta1 must be non-negative".into());
                }
                if alpha1 + beta1 >= 1.0 {
                    return bad(format!("alpha1 + beta1 = {} must be below 1", alpha1 + beta1));
                }
            }
            ProcessSpec::StochVol { alpha, phi, sigma_w2 } => {
                if !alpha.is_finite() {
                    return bad("alpha must be finite".into());
                }
                if !(phi.is_finite() && phi.abs() < 1.0) {
                    return bad(format!("|phi| must be below 1, got {phi}"));
                }
                if !(sigma_w2.is_finite() && *sigma_w2 > 0.0) {
                    return bad(format!("sigma_w2 must be positive, got {sigma_w2}"));
                }
            }
        }
        Ok(())
    }

    /// Filter coefficients actually used for a linear process (after
    /// truncation of an infinite filter).
    pub fn linear_coefficients(&self) -> Option<Vec<f64>> {
        match self {
            ProcessSpec::Linear { filter, .. } => Some(match filter {
                LinearFilter::Explicit(c) => c.clone(),
                LinearFilter::PowerDecay { d } => {
                    let len = power_decay_length(*d);
                    (0..len).map(|j| ((j + 1) as f64).powf(-d)).collect()
                }
            }),
            _ => None,
        }
    }

    /// `Var(X_t)` of the simulated process.
    pub fn stationary_variance(&self) -> Result<f64> {
        self.autocovariance(0)
    }

    /// `γ(h)` of the simulated process. GARCH and SV are martingale
    /// differences, so their autocovariances vanish off lag zero.
    pub fn autocovariance(&self, h: usize) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            ProcessSpec::Iid { variance } => {
                if h == 0 {
                    *variance
                } else {
                    0.0
                }
            }
            ProcessSpec::Linear { variance, .. } => {
                let psi = self.linear_coefficients().unwrap_or_default();
                if h >= psi.len() {
                    0.0
                } else {
                    variance * psi.iter().zip(&psi[h..]).map(|(a, b)| a * b).sum::<f64>()
                }
            }
            ProcessSpec::Garch11 { alpha0, alpha1, beta1 } => {
                if h == 0 {
                    alpha0 / (1.0 - alpha1 - beta1)
                } else {
                    0.0
                }
            }
            ProcessSpec::StochVol { alpha, phi, sigma_w2 } => {
                if h == 0 {
                    let mu = alpha / (1.0 - phi);
                    let s = sigma_w2 / (1.0 - phi * phi);
                    (mu + s / 2.0).exp()
                } else {
                    0.0
                }
            }
        })
    }

    /// Number of pre-sample steps needed before a path is in its stationary
    /// regime (the filter length minus one for linear processes).
    pub fn burn_in(&self) -> usize {
        match self {
            ProcessSpec::Iid { .. } => 0,
            ProcessSpec::Linear { .. } => self.linear_coefficients().map_or(0, |c| c.len() - 1),
            ProcessSpec::Garch11 { .. } | ProcessSpec::StochVol { .. } => BURN_IN,
        }
    }

    pub(crate) fn compile(&self) -> Result<Process> {
        self.validate()?;
        Ok(Process {
            spec: self.clone(),
            psi: self.linear_coefficients(),
            burn_in: self.burn_in(),
        })
    }
}

/// Number of terms kept for `ψ_j = (j+1)^{-d}`: the smallest `J` whose tail
/// `Σ_{j≥J} ψ_j²` is certainly below `LINEAR_TAIL_TOL` times the total,
/// using `Σ_{j≥J} ψ_j² ≤ ψ_J² + (J+1)^{1-2d}/(2d-1)` and total ≥ ψ_0² = 1.
pub fn power_decay_length(d: f64) -> usize {
    let bound = |j: usize| {
        let x = (j + 1) as f64;
        x.powf(-2.0 * d) + x.powf(1.0 - 2.0 * d) / (2.0 * d - 1.0)
    };
    let mut j = 1;
    while j < LINEAR_MAX_TERMS && bound(j) >= LINEAR_TAIL_TOL {
        j += 1;
    }
    j
}

/// `(Σ_{j≥t} (j+1)^{-2d})^{1/2}`: the exact coupling tail of the untruncated
/// filter. Terms are summed directly up to `j = 1000·(t+1)` and the rest is
/// closed with the midpoint integral bound.
pub fn power_decay_tail_norm(d: f64, t: usize) -> f64 {
    let end = 1000 * (t + 1);
    let mut acc = CompensatedSum::new();
    for j in (t..end).rev() {
        acc.add(((j + 1) as f64).powf(-2.0 * d));
    }
    acc.add((end as f64 + 0.5).powf(1.0 - 2.0 * d) / (2.0 * d - 1.0));
    acc.value().sqrt()
}

/// `t^{1/2-d} / (2d-1)^{1/2}`, the leading term of [`power_decay_tail_norm`].
pub fn power_decay_tail_asymptote(d: f64, t: usize) -> f64 {
    (t as f64).powf(0.5 - d) / (2.0 * d - 1.0).sqrt()
}

/// `f(0) = Σ_h γ(h) / 2π` of the simulated process.
pub fn theoretical_f0(spec: &ProcessSpec) -> Result<f64> {
    spec.validate()?;
    let tau = match spec {
        ProcessSpec::Linear { variance, .. } => {
            let s: f64 = spec.linear_coefficients().unwrap_or_default().iter().sum();
            variance * s * s
        }
        _ => spec.stationary_variance()?,
    };
    Ok(tau / std::f64::consts::TAU)
}

/// `E|β1 + α1 ε²|² = β1² + 2 α1 β1 + 3 α1²` for standard normal `ε`.
pub fn garch_fourth_moment_factor(alpha1: f64, beta1: f64) -> f64 {
    beta1 * beta1 + 2.0 * alpha1 * beta1 + 3.0 * alpha1 * alpha1
}

/// Whether a Gaussian GARCH(1,1) has a finite fourth moment.
pub fn garch_fourth_moment_check(alpha1: f64, beta1: f64) -> bool {
    garch_fourth_moment_factor(alpha1, beta1) < 1.0
}

/// Exact `E|u_t - u_t^{(m)}|⁴` for the SV volatility factor
/// `u_t = exp(x_t / 2)`, where `u_t^{(m)}` replaces the AR innovations at
/// lags `m` and beyond with independent copies.
///
/// With `μ = α/(1-φ)`, `s = σ_w²/(1-φ²)` and `v = φ^{2m} s`:
///
/// ```text
/// E|u_t - u_t^{(m)}|⁴ = exp(2μ + 2s) · { 2 - 8 exp(-3v/4) + 6 exp(-v) },
/// ```
///
/// which follows from `u_t = exp(ζ + ξ)` with independent Gaussian
/// `ζ ~ N(μ/2, (s - v)/4)` and `ξ, ξ' ~ N(0, v/4)`. It is `O(φ^{4m})`.
pub fn sv_coupling_fourth_moment(alpha: f64, phi: f64, sigma_w2: f64, m: usize) -> Result<f64> {
    ProcessSpec::stoch_vol(alpha, phi, sigma_w2).validate()?;
    if m < 1 {
        return Err(LrvError::InvalidSpec("coupling lag m must be at least 1".into()));
    }
    let mu = alpha / (1.0 - phi);
    let s = sigma_w2 / (1.0 - phi * phi);
    let v = phi.abs().powi(2 * m as i32) * s;
    // 2 - 8e^{-3v/4} + 6e^{-v} loses all digits to cancellation for small v;
    // switch to its Taylor series there.
    let bracket = if v < 1e-3 {
        0.75 * v * v - 0.4375 * v * v * v + 0.144_531_25 * v.powi(4)
    } else {
        2.0 - 8.0 * (-0.75 * v).exp() + 6.0 * (-v).exp()
    };
    Ok((2.0 * mu + 2.0 * s).exp() * bracket.max(0.0))
}

/// Compiled process: validated spec with the filter materialized.
#[derive(Debug, Clone)]
pub(crate) struct Process {
    spec: ProcessSpec,
    psi: Option<Vec<f64>>,
    burn_in: usize,
}

impl Process {
    pub(crate) fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub(crate) fn uses_aux(&self) -> bool {
        matches!(self.spec, ProcessSpec::StochVol { .. })
    }

    pub(crate) fn draw_shocks<R: Rng + ?Sized>(&self, rng: &mut R, len: usize) -> Vec<Shock> {
        let aux = self.uses_aux();
        (0..len)
            .map(|_| Shock {
                eps: rng::std_normal(rng),
                aux: if aux { rng::std_normal(rng) } else { 0.0 },
            })
            .collect()
    }

    /// Path value at each position of `shocks`, plus the conditional
    /// variance where the model has one.
    pub(crate) fn path(&self, shocks: &[Shock]) -> (Vec<f64>, Option<Vec<f64>>) {
        match &self.spec {
            ProcessSpec::Iid { variance } => {
                let sd = variance.sqrt();
                (shocks.iter().map(|s| sd * s.eps).collect(), None)
            }
            ProcessSpec::Linear { variance, .. } => {
                let psi = self.psi.as_deref().unwrap_or(&[]);
                let sd = variance.sqrt();
                let out = (0..shocks.len()).map(|k| sd * linear_dot(psi, shocks, k)).collect();
                (out, None)
            }
            ProcessSpec::Garch11 { alpha0, alpha1, beta1 } => {
                let stat = alpha0 / (1.0 - alpha1 - beta1);
                let (mut sig2, mut r2) = (stat, stat);
                let mut out = Vec::with_capacity(shocks.len());
                let mut vol = Vec::with_capacity(shocks.len());
                for s in shocks {
                    sig2 = alpha0 + alpha1 * r2 + beta1 * sig2;
                    let r = sig2.sqrt() * s.eps;
                    r2 = r * r;
                    out.push(r);
                    vol.push(sig2);
                }
                (out, Some(vol))
            }
            ProcessSpec::StochVol { alpha, phi, sigma_w2 } => {
                let mu = alpha / (1.0 - phi);
                let sd_stat = (sigma_w2 / (1.0 - phi * phi)).sqrt();
                let sd_w = sigma_w2.sqrt();
                let mut out = Vec::with_capacity(shocks.len());
                let mut vol = Vec::with_capacity(shocks.len());
                let mut x = 0.0;
                for (k, s) in shocks.iter().enumerate() {
                    // The first shock stands in for the infinite past: it
                    // draws x from its stationary law.
                    x = if k == 0 {
                        mu + sd_stat * s.aux
                    } else {
                        alpha + phi * x + sd_w * s.aux
                    };
                    let v = x.exp();
                    out.push((x / 2.0).exp() * s.eps);
                    vol.push(v);
                }
                (out, Some(vol))
            }
        }
    }

    /// Path values at the given positions only; cheaper than [`Self::path`]
    /// for linear filters.
    pub(crate) fn values_at(&self, shocks: &[Shock], positions: &[usize]) -> Vec<f64> {
        match &self.spec {
            ProcessSpec::Linear { variance, .. } => {
                let psi = self.psi.as_deref().unwrap_or(&[]);
                let sd = variance.sqrt();
                positions.iter().map(|&k| sd * linear_dot(psi, shocks, k)).collect()
            }
            _ => {
                let end = positions.iter().copied().max().map_or(0, |p| p + 1);
                let (path, _) = self.path(&shocks[..end]);
                positions.iter().map(|&k| path[k]).collect()
            }
        }
    }
}

/// `Σ_{j ≤ k} ψ_j ε_{k-j}` over the available window.
fn linear_dot(psi: &[f64], shocks: &[Shock], k: usize) -> f64 {
    let terms = psi.len().min(k + 1);
    (0..terms).map(|j| psi[j] * shocks[k - j].eps).sum()
}

/// Simulates `n` observations using stream 0 of `seed`.
pub fn simulate(spec: &ProcessSpec, n: usize, seed: u64) -> Result<TimeSeries<f64>> {
    simulate_with_rng(spec, n, &mut stream_rng(seed, 0))
}

pub fn simulate_with_rng<R: Rng + ?Sized>(spec: &ProcessSpec, n: usize, rng: &mut R) -> Result<TimeSeries<f64>> {
    Ok(simulate_with_volatility(spec, n, rng)?.0)
}

/// Like [`simulate_with_rng`], also returning the conditional variance path
/// (`σ_t²` for GARCH, `exp(x_t)` for SV; `None` otherwise).
pub fn simulate_with_volatility<R: Rng + ?Sized>(
    spec: &ProcessSpec,
    n: usize,
    rng: &mut R,
) -> Result<(TimeSeries<f64>, Option<Vec<f64>>)> {
    if n < 1 {
        return Err(LrvError::InvalidLength { n, min: 1 });
    }
    let process = spec.compile()?;
    let burn = process.burn_in();
    let shocks = process.draw_shocks(rng, burn + n);
    let (mut path, vol) = process.path(&shocks);
    let path = path.split_off(burn);
    let vol = vol.map(|mut v| v.split_off(burn));
    Ok((TimeSeries::new(path)?, vol))
}
