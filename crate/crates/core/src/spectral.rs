//! Fourier-frequency periodogram and long-run variance at frequency zero.
//!
//! With Fourier frequencies `ω_j = 2πj/n`, the DFT and periodogram are
//!
//! ```text
//! 𝒳_n(ω_j) = (2πn)^{-1/2} Σ_{t=1}^n X_t e^{-itω_j},     I_n(ω_j) = |𝒳_n(ω_j)|²
//! ```
//!
//! and the smoothed periodogram `Q_n = (1/m) Σ_{j=1}^m I_n(ω_j)` estimates
//! the spectral density at the origin, `f(0)`. The long-run variance is
//! `τ = 2π f(0)`.
//!
//! `Q_n` is also a quadratic form in the data. Writing
//! `a_{n,t} = (1/m) Σ_{j=1}^m cos(t ω_j)`,
//!
//! ```text
//! Q_n = (1/2π) Σ_{|h|<n} a_{n,h} γ̂(h),     γ̂(h) = (1/n) Σ_{t=1}^{n-|h|} X_{t+|h|} X_t,
//! ```
//!
//! which is the second computation path offered by
//! [`lrv_smoothed_periodogram`]. Both paths agree to rounding error.
//!
//! Bandwidths are restricted to `1 ≤ m ≤ ⌊(n-1)/2⌋`, which excludes the zero
//! frequency and the Nyquist index.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{LrvError, Result};
use crate::scalar::{csum, CompensatedSum, Scalar};
use crate::series::TimeSeries;

/// Largest admissible number of Fourier frequencies for a sample of size `n`.
pub fn max_bandwidth(n: usize) -> usize {
    n.saturating_sub(1) / 2
}

/// Above this many ordinates the periodogram switches from direct summation
/// to a full FFT.
pub const DIRECT_DFT_MAX_M: usize = 64;

pub(crate) fn check_bandwidth(n: usize, m: usize) -> Result<()> {
    if n < 2 {
        return Err(LrvError::InvalidLength { n, min: 2 });
    }
    let max = max_bandwidth(n);
    if m < 1 || m > max {
        return Err(LrvError::BandwidthOutOfRange { m, max });
    }
    Ok(())
}

/// Bandwidth `⌊n^β⌋` clamped into the admissible range.
pub fn bandwidth_from_exponent(n: usize, exponent: f64) -> usize {
    // Nudge so that exact powers such as 10000^0.75 = 1000 are not floored
    // to 999 by rounding in powf.
    let m = ((n as f64).powf(exponent) * (1.0 + 1e-12)).floor() as usize;
    m.clamp(1, max_bandwidth(n).max(1))
}

/// `ω_j = 2πj/n` for `j = 1..=m`.
pub fn fourier_frequencies<T: Scalar>(n: usize, m: usize) -> Result<Vec<T>> {
    check_bandwidth(n, m)?;
    let step = T::TAU() / T::from_usize_exact(n);
    Ok((1..=m).map(|j| step * T::from_usize_exact(j)).collect())
}

/// How the DFT ordinates are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DftMethod {
    /// Direct summation for `m ≤ 64`, FFT otherwise.
    #[default]
    Auto,
    Direct,
    Fft,
}

/// Periodogram ordinates at `ω_1, ..., ω_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramOrdinates<T> {
    pub n: usize,
    pub frequencies: Vec<T>,
    pub ordinates: Vec<T>,
}

impl<T: Scalar> PeriodogramOrdinates<T> {
    pub fn m(&self) -> usize {
        self.ordinates.len()
    }

    /// Builds ordinates from raw values, e.g. for evaluating the Whittle
    /// objective on synthetic input.
    pub fn from_parts(n: usize, ordinates: Vec<T>) -> Result<Self> {
        let frequencies = fourier_frequencies(n, ordinates.len())?;
        if let Some(index) = ordinates.iter().position(|v| !v.is_finite() || *v < T::zero()) {
            return Err(LrvError::NonFiniteInput { index });
        }
        Ok(Self {
            n,
            frequencies,
            ordinates,
        })
    }
}

/// `I_n(ω_j)`, `j = 1..=m`. The series is centred first, which leaves these
/// ordinates unchanged in exact arithmetic.
pub fn periodogram<T: Scalar>(series: &TimeSeries<T>, m: usize) -> Result<PeriodogramOrdinates<T>> {
    periodogram_with(series, m, DftMethod::Auto)
}

pub fn periodogram_with<T: Scalar>(
    series: &TimeSeries<T>,
    m: usize,
    method: DftMethod,
) -> Result<PeriodogramOrdinates<T>> {
    let n = series.len();
    check_bandwidth(n, m)?;
    let centred = series.demean();
    let x = centred.values();
    let use_fft = match method {
        DftMethod::Auto => m > DIRECT_DFT_MAX_M,
        DftMethod::Direct => false,
        DftMethod::Fft => true,
    };
    let sq = if use_fft {
        let spectrum = fft_real(x);
        spectrum[1..=m].iter().map(|c| c.norm_sqr()).collect::<Vec<_>>()
    } else {
        direct_dft_norm_sqr(x, m)
    };
    let scale = T::one() / (T::TAU() * T::from_usize_exact(n));
    Ok(PeriodogramOrdinates {
        n,
        frequencies: fourier_frequencies(n, m)?,
        ordinates: sq.into_iter().map(|v| v * scale).collect(),
    })
}

/// Periodogram over the whole Fourier grid `j = -⌊(n-1)/2⌋ ..= ⌊n/2⌋`,
/// computed from the series as given (no centring).
#[derive(Debug, Clone, PartialEq)]
pub struct FullPeriodogram<T> {
    pub n: usize,
    pub indices: Vec<i64>,
    pub frequencies: Vec<T>,
    pub ordinates: Vec<T>,
}

impl<T: Scalar> FullPeriodogram<T> {
    pub fn ordinate(&self, j: i64) -> Option<T> {
        self.indices.iter().position(|&k| k == j).map(|p| self.ordinates[p])
    }
}

pub fn periodogram_full<T: Scalar>(series: &TimeSeries<T>) -> Result<FullPeriodogram<T>> {
    let n = series.len();
    series.require_len(2)?;
    let spectrum = fft_real(series.values());
    let scale = T::one() / (T::TAU() * T::from_usize_exact(n));
    let lo = -(((n - 1) / 2) as i64);
    let hi = (n / 2) as i64;
    let indices: Vec<i64> = (lo..=hi).collect();
    let frequencies = indices
        .iter()
        .map(|&j| T::TAU() * T::from_i64(j).unwrap() / T::from_usize_exact(n))
        .collect();
    let ordinates = indices
        .iter()
        .map(|&j| spectrum[j.rem_euclid(n as i64) as usize].norm_sqr() * scale)
        .collect();
    Ok(FullPeriodogram {
        n,
        indices,
        frequencies,
        ordinates,
    })
}

fn fft_real<T: Scalar>(x: &[T]) -> Vec<Complex<T>> {
    let n = x.len();
    let fft: Arc<dyn Fft<T>> = FftPlanner::new().plan_fft_forward(n);
    let mut buf: Vec<Complex<T>> = x.iter().map(|&v| Complex::new(v, T::zero())).collect();
    fft.process(&mut buf);
    buf
}

/// `|Σ_t x_t e^{-i t ω_j}|²` for `j = 1..=m` by direct summation against a
/// table of the n-th roots of unity.
fn direct_dft_norm_sqr<T: Scalar>(x: &[T], m: usize) -> Vec<T> {
    let n = x.len();
    let step = T::TAU() / T::from_usize_exact(n);
    let (cos_t, sin_t): (Vec<T>, Vec<T>) = (0..n)
        .map(|k| {
            let a = step * T::from_usize_exact(k);
            (a.cos(), a.sin())
        })
        .unzip();
    (1..=m)
        .map(|j| {
            let mut re = CompensatedSum::new();
            let mut im = CompensatedSum::new();
            let mut k = 0usize;
            for &v in x {
                re.add(v * cos_t[k]);
                im.add(-(v * sin_t[k]));
                k += j;
                if k >= n {
                    k -= n;
                }
            }
            let (re, im) = (re.value(), im.value());
            re * re + im * im
        })
        .collect()
}

/// `γ̂(h) = (1/n) Σ_{t=1}^{n-|h|} X_{t+|h|} X_t`. No centring is applied.
pub fn sample_autocovariance<T: Scalar>(series: &TimeSeries<T>, h: i64) -> Result<T> {
    let n = series.len();
    let lag = h.unsigned_abs() as usize;
    if n == 0 || lag >= n {
        return Err(LrvError::LagOutOfRange { lag: h, n });
    }
    let x = series.values();
    let s = csum((0..n - lag).map(|t| x[t + lag] * x[t]));
    Ok(s / T::from_usize_exact(n))
}

/// `γ̂(0), ..., γ̂(n-1)` via a zero-padded FFT. No centring is applied.
pub fn sample_autocovariances<T: Scalar>(series: &TimeSeries<T>) -> Result<Vec<T>> {
    let n = series.len();
    series.require_len(1)?;
    let len = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    for (b, &v) in buf.iter_mut().zip(series.values()) {
        b.re = v;
    }
    fwd.process(&mut buf);
    for c in buf.iter_mut() {
        *c = Complex::new(c.norm_sqr(), T::zero());
    }
    inv.process(&mut buf);
    let norm = T::from_usize_exact(len) * T::from_usize_exact(n);
    Ok(buf[..n].iter().map(|c| c.re / norm).collect())
}

/// The weights `a_{n,t} = (1/m) Σ_{j=1}^m cos(t ω_j)` of the quadratic-form
/// representation of `Q_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineWeights<T> {
    pub n: usize,
    pub m: usize,
    /// `a_{n,t}` for `t = 0..n`.
    values: Vec<T>,
}

impl<T: Scalar> CosineWeights<T> {
    /// `a_{n,t}` for any integer lag; the weights are even and `n`-periodic.
    pub fn at(&self, t: i64) -> T {
        self.values[t.rem_euclid(self.n as i64) as usize]
    }

    /// Weights for lags `0..n`.
    pub fn as_slice(&self) -> &[T] {
        &self.values
    }
}

pub fn cosine_weights<T: Scalar>(n: usize, m: usize) -> Result<CosineWeights<T>> {
    check_bandwidth(n, m)?;
    // Lags t and n - t share a weight; computing only t <= n/2 keeps the
    // symmetry exact.
    let values = (0..n).map(|t| dirichlet_mean(n, m, t.min(n - t))).collect();
    Ok(CosineWeights { n, m, values })
}

/// `(1/m) Σ_{j=1}^m cos(2π t j / n)` through the Dirichlet-kernel identity
/// `Σ_{j=1}^m cos(jx) = sin(mx/2) cos((m+1)x/2) / sin(x/2)`, with all angle
/// reductions done in integer arithmetic.
fn dirichlet_mean<T: Scalar>(n: usize, m: usize, t: usize) -> T {
    let t = t % n;
    if t == 0 {
        return T::one();
    }
    let two_n = 2 * n as u128;
    let half_angle = |k: u128| T::PI() * T::from_u128(k % two_n).unwrap() / T::from_usize_exact(n);
    let (t, m128) = (t as u128, m as u128);
    let num = half_angle(m128 * t).sin() * half_angle((m128 + 1) * t).cos();
    let den = half_angle(t).sin();
    num / den / T::from_usize_exact(m)
}

/// Which algebraic route produced a [`SpectralEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LrvPath {
    /// Average of the first `m` periodogram ordinates.
    #[default]
    FrequencyAverage,
    /// `(1/2π) Σ_{|h|<n} a_{n,h} γ̂(h)`.
    AutocovarianceWeights,
}

impl LrvPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            LrvPath::FrequencyAverage => "frequency_average",
            LrvPath::AutocovarianceWeights => "autocovariance_weights",
        }
    }
}

impl std::str::FromStr for LrvPath {
    type Err = LrvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "frequency_average" | "freq" => Ok(LrvPath::FrequencyAverage),
            "autocovariance_weights" | "acov" => Ok(LrvPath::AutocovarianceWeights),
            other => Err(LrvError::Config(format!("unknown path {other:?}"))),
        }
    }
}

/// Smoothed-periodogram estimate of `f(0)` and the long-run variance.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate<T> {
    pub q_n: T,
    pub f0_hat: T,
    pub lrv_hat: T,
    pub n: usize,
    pub m: usize,
    pub path: LrvPath,
}

impl<T: Scalar> SpectralEstimate<T> {
    fn from_q(q_n: T, n: usize, m: usize, path: LrvPath) -> Self {
        Self {
            q_n,
            f0_hat: q_n,
            lrv_hat: T::TAU() * q_n,
            n,
            m,
            path,
        }
    }
}

/// `Q_n` by either route. Series not flagged as demeaned are centred first.
pub fn lrv_smoothed_periodogram<T: Scalar>(
    series: &TimeSeries<T>,
    m: usize,
    path: LrvPath,
) -> Result<SpectralEstimate<T>> {
    let n = series.len();
    check_bandwidth(n, m)?;
    let q = match path {
        LrvPath::FrequencyAverage => {
            let p = periodogram(series, m)?;
            csum(p.ordinates.iter().copied()) / T::from_usize_exact(m)
        }
        LrvPath::AutocovarianceWeights => {
            let centred = series.demean();
            let gamma = sample_autocovariances(&centred)?;
            let a = cosine_weights::<T>(n, m)?;
            let mut acc = CompensatedSum::new();
            acc.add(gamma[0]);
            let two = T::lit(2.0);
            for (w, g) in a.as_slice()[1..n].iter().zip(&gamma[1..n]) {
                acc.add(two * *w * *g);
            }
            // Rounding can leave a tiny negative value for a near-zero estimate.
            (acc.value() / T::TAU()).max(T::zero())
        }
    };
    Ok(SpectralEstimate::from_q(q, n, m, path))
}

/// Weight function of a lag-window estimator, defined on `[-1, 1]` with
/// `w(0) = 1` and `w(-x) = w(x)`.
pub trait LagWindow<T> {
    fn weight(&self, x: T) -> T;
}

/// `w(x) = 1 - |x|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bartlett;

/// `w(x) = 1` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Truncated;

#[derive(Debug, Clone, Copy, Default)]
pub struct Parzen;

impl<T: Scalar> LagWindow<T> for Bartlett {
    fn weight(&self, x: T) -> T {
        (T::one() - x.abs()).max(T::zero())
    }
}

impl<T: Scalar> LagWindow<T> for Truncated {
    fn weight(&self, x: T) -> T {
        if x.abs() <= T::one() {
            T::one()
        } else {
            T::zero()
        }
    }
}

impl<T: Scalar> LagWindow<T> for Parzen {
    fn weight(&self, x: T) -> T {
        let a = x.abs();
        if a <= T::lit(0.5) {
            T::one() - T::lit(6.0) * a * a + T::lit(6.0) * a * a * a
        } else if a <= T::one() {
            T::lit(2.0) * (T::one() - a).powi(3)
        } else {
            T::zero()
        }
    }
}

impl<T, F: Fn(T) -> T> LagWindow<T> for F {
    fn weight(&self, x: T) -> T {
        self(x)
    }
}

/// `⌊n^{1/3}⌋`, at least 1.
pub fn default_lag_window_bandwidth(n: usize) -> usize {
    ((n as f64).cbrt().floor() as usize).max(1)
}

/// Lag-window estimate `f̂(0) = (1/2π) Σ_{|r|≤ℓ} w(r/ℓ) γ̂(r)`.
pub fn lrv_lag_window<T: Scalar, W: LagWindow<T>>(
    series: &TimeSeries<T>,
    window: &W,
    bandwidth: usize,
) -> Result<T> {
    let n = series.len();
    series.require_len(2)?;
    if bandwidth < 1 || bandwidth >= n {
        return Err(LrvError::BandwidthOutOfRange {
            m: bandwidth,
            max: n - 1,
        });
    }
    let w0 = window.weight(T::zero());
    if (w0 - T::one()).abs() > T::lit(1e-12) {
        return Err(LrvError::InvalidWindow(format!("w(0) = {w0}, expected 1")));
    }
    for probe in [0.25, 0.5, 0.75, 1.0] {
        let (p, q) = (window.weight(T::lit(probe)), window.weight(T::lit(-probe)));
        if (p - q).abs() > T::lit(1e-12) * (T::one() + p.abs()) {
            return Err(LrvError::InvalidWindow(format!("w is not symmetric at ±{probe}")));
        }
    }
    let centred = series.demean();
    let ell = T::from_usize_exact(bandwidth);
    let mut acc = CompensatedSum::new();
    acc.add(sample_autocovariance(&centred, 0)?);
    for r in 1..=bandwidth {
        let w = window.weight(T::from_usize_exact(r) / ell);
        if w != T::zero() {
            acc.add(T::lit(2.0) * w * sample_autocovariance(&centred, r as i64)?);
        }
    }
    Ok(acc.value() / T::TAU())
}
