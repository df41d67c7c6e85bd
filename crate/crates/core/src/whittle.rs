//! Local Whittle estimation of the Hurst parameter.
//!
//! The estimator minimizes, over a compact interval `[Δ1, Δ2] ⊂ (0, 1)`,
//!
//! ```text
//! L(H) = log( (1/m) Σ_{l=1}^m ω_l^{2H-1} I_n(ω_l) ) - (2H-1) (1/m) Σ_{l=1}^m log ω_l.
//! ```
//!
//! Under short memory `Ĥ → 1/2` and `2√m (Ĥ - 1/2)` is asymptotically
//! standard normal. The objective is evaluated in the equivalent centred form
//! `log( (1/m) Σ exp((2H-1)(log ω_l - mean log ω)) I_n(ω_l) )`, which keeps
//! the exponentials near one for `H` close to `1/2`.
//!
//! Minimization is a uniform grid followed by golden-section refinement
//! around the best grid point. Grid ties resolve to the smallest `H`.

use crate::error::{LrvError, Result};
use crate::optimize::{argmin_first, bisect_increasing, golden_section, uniform_grid};
use crate::scalar::{csum, Scalar};
use crate::series::TimeSeries;
use crate::spectral::{periodogram, PeriodogramOrdinates};

/// Bandwidth exponent used when none is given: `m = ⌊N^0.65⌋`.
pub const DEFAULT_M_EXPONENT: f64 = 0.65;
pub const DEFAULT_BOUNDS: (f64, f64) = (0.05, 0.95);
pub const DEFAULT_GRID_POINTS: usize = 512;
pub const DEFAULT_REFINE_TOL: f64 = 1e-8;
/// Objective range over the grid below which a fit is flagged degenerate.
pub const DEGENERATE_RANGE: f64 = 1e-12;

/// `ν_{l,m} = log l - (1/m) Σ_{j=1}^m log j` for `l = 1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct NuWeights<T> {
    pub m: usize,
    pub values: Vec<T>,
}

pub fn nu_weights<T: Scalar>(m: usize) -> Result<NuWeights<T>> {
    if m < 1 {
        return Err(LrvError::InvalidBandwidth(m));
    }
    let logs: Vec<T> = (1..=m).map(|l| T::from_usize_exact(l).ln()).collect();
    let mf = T::from_usize_exact(m);
    let mean = csum(logs.iter().copied()) / mf;
    let mut values: Vec<T> = logs.into_iter().map(|v| v - mean).collect();
    // Second centring pass removes the m·ulp(mean) residue of the first.
    let residue = csum(values.iter().copied()) / mf;
    for v in &mut values {
        *v = *v - residue;
    }
    Ok(NuWeights { m, values })
}

/// Search settings for [`fit_local_whittle_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittleOptions {
    pub bounds: (f64, f64),
    pub grid_points: usize,
    pub refine_tol: f64,
}

impl Default for WhittleOptions {
    fn default() -> Self {
        Self {
            bounds: DEFAULT_BOUNDS,
            grid_points: DEFAULT_GRID_POINTS,
            refine_tol: DEFAULT_REFINE_TOL,
        }
    }
}

impl WhittleOptions {
    pub fn with_bounds(lower: f64, upper: f64) -> Self {
        Self {
            bounds: (lower, upper),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let (lower, upper) = self.bounds;
        if !(lower > 0.0 && lower < upper && upper < 1.0) {
            return Err(LrvError::InvalidBounds { lower, upper });
        }
        if self.grid_points < 2 || !(self.refine_tol > 0.0) {
            return Err(LrvError::Config(format!(
                "grid_points must be >= 2 and refine_tol > 0 (got {}, {})",
                self.grid_points, self.refine_tol
            )));
        }
        Ok(())
    }
}

/// Outcome of a local Whittle fit.
#[derive(Debug, Clone, PartialEq)]
pub struct WhittleFit<T> {
    pub h_hat: T,
    /// `L(Ĥ)`.
    pub objective: T,
    pub m: usize,
    pub bounds: (f64, f64),
    /// `2√m (Ĥ - 1/2)`.
    pub normalized: T,
    pub grid_points: usize,
    pub refine_tol: f64,
    /// Set when the objective is flat over the grid; `h_hat` is then the
    /// lower bound.
    pub degenerate: bool,
}

/// The objective `L(H)` with its frequency-dependent pieces precomputed.
#[derive(Debug, Clone)]
pub struct WhittleObjective<T> {
    centred_log_freq: Vec<T>,
    ordinates: Vec<T>,
}

impl<T: Scalar> WhittleObjective<T> {
    pub fn new(ordinates: &PeriodogramOrdinates<T>) -> Result<Self> {
        if ordinates.ordinates.is_empty() || ordinates.ordinates.iter().all(|&v| v <= T::zero()) {
            return Err(LrvError::DegenerateOrdinates);
        }
        let logs: Vec<T> = ordinates.frequencies.iter().map(|w| w.ln()).collect();
        let mean = csum(logs.iter().copied()) / T::from_usize_exact(logs.len());
        Ok(Self {
            centred_log_freq: logs.into_iter().map(|l| l - mean).collect(),
            ordinates: ordinates.ordinates.clone(),
        })
    }

    pub fn m(&self) -> usize {
        self.ordinates.len()
    }

    pub fn eval(&self, h: T) -> T {
        let e = T::lit(2.0) * h - T::one();
        let s = csum(
            self.centred_log_freq
                .iter()
                .zip(&self.ordinates)
                .map(|(&c, &i)| (e * c).exp() * i),
        );
        (s / T::from_usize_exact(self.m())).ln()
    }

    /// Numerator of `dL/dH` up to the positive factor `2 / Σ e^{(2H-1)c} I`;
    /// only its sign is used.
    pub fn slope_sign_term(&self, h: T) -> T {
        let e = T::lit(2.0) * h - T::one();
        csum(
            self.centred_log_freq
                .iter()
                .zip(&self.ordinates)
                .map(|(&c, &i)| c * (e * c).exp() * i),
        )
    }
}

/// `L(H)` for the given ordinates.
pub fn whittle_objective<T: Scalar>(ordinates: &PeriodogramOrdinates<T>, h: T) -> Result<T> {
    if !(h > T::zero() && h < T::one()) {
        return Err(LrvError::InvalidBounds {
            lower: h.to_f64().unwrap_or(f64::NAN),
            upper: h.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(WhittleObjective::new(ordinates)?.eval(h))
}

/// Local Whittle fit with the default grid and tolerance.
pub fn fit_local_whittle<T: Scalar>(series: &TimeSeries<T>, m: usize, bounds: (f64, f64)) -> Result<WhittleFit<T>> {
    fit_local_whittle_with(series, m, &WhittleOptions::with_bounds(bounds.0, bounds.1))
}

pub fn fit_local_whittle_with<T: Scalar>(
    series: &TimeSeries<T>,
    m: usize,
    options: &WhittleOptions,
) -> Result<WhittleFit<T>> {
    options.validate()?;
    let p = periodogram(series, m)?;
    fit_ordinates(&p, options)
}

/// Local Whittle fit on precomputed periodogram ordinates.
pub fn fit_ordinates<T: Scalar>(ordinates: &PeriodogramOrdinates<T>, options: &WhittleOptions) -> Result<WhittleFit<T>> {
    options.validate()?;
    let obj = WhittleObjective::new(ordinates)?;
    let (lower, upper) = (T::lit(options.bounds.0), T::lit(options.bounds.1));
    let (grid, values) = uniform_grid(lower, upper, options.grid_points, |h| obj.eval(h));
    let best = argmin_first(&values);
    let (lo_v, hi_v) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(a, b), &v| (a.min(v), b.max(v)));
    let degenerate = (hi_v - lo_v) < T::lit(DEGENERATE_RANGE);

    let (h_hat, objective) = if degenerate {
        (lower, values[0])
    } else {
        let a = grid[best.saturating_sub(1)];
        let b = grid[(best + 1).min(grid.len() - 1)];
        // L is a log-sum-exp of affine functions of H, hence convex, and its
        // minimizer on [a, b] is where the slope changes sign. Locating that
        // sign change is exact to rounding of the slope; comparing values of
        // a function that is flat to √eps near its minimum is not.
        let (sa, sb) = (obj.slope_sign_term(a), obj.slope_sign_term(b));
        if sa.is_finite() && sb.is_finite() {
            let h = if sa >= T::zero() {
                a
            } else if sb <= T::zero() {
                b
            } else {
                bisect_increasing(a, b, |h| obj.slope_sign_term(h))
            };
            (h, obj.eval(h))
        } else {
            let refined = golden_section(a, b, T::lit(options.refine_tol), 200, |h| obj.eval(h));
            if refined.value < values[best] {
                (refined.x, refined.value)
            } else {
                (grid[best], values[best])
            }
        }
    };
    let m = obj.m();
    Ok(WhittleFit {
        h_hat,
        objective,
        m,
        bounds: options.bounds,
        normalized: normalized_statistic(h_hat, m),
        grid_points: options.grid_points,
        refine_tol: options.refine_tol,
        degenerate,
    })
}

/// `2√m (h - 1/2)`.
pub fn normalized_statistic<T: Scalar>(h: T, m: usize) -> T {
    T::lit(2.0) * T::from_usize_exact(m).sqrt() * (h - T::lit(0.5))
}

/// `Q̃_n = (1/√m) Σ_{l=1}^m ν_{l,m} (I_n(ω_l)/f0 - 1)`, a diagnostic whose
/// law tends to N(0, 1) under short memory when `f0` is the true `f(0)`.
pub fn weighted_clt_statistic<T: Scalar>(series: &TimeSeries<T>, m: usize, f0: T) -> Result<T> {
    if !(f0 > T::zero()) || !f0.is_finite() {
        return Err(LrvError::InvalidF0(f0.to_f64().unwrap_or(f64::NAN)));
    }
    let p = periodogram(series, m)?;
    weighted_clt_from_ordinates(&p.ordinates, f0)
}

pub fn weighted_clt_from_ordinates<T: Scalar>(ordinates: &[T], f0: T) -> Result<T> {
    if !(f0 > T::zero()) || !f0.is_finite() {
        return Err(LrvError::InvalidF0(f0.to_f64().unwrap_or(f64::NAN)));
    }
    let m = ordinates.len();
    let nu = nu_weights::<T>(m)?;
    let s = csum(nu.values.iter().zip(ordinates).map(|(&v, &i)| v * (i / f0 - T::one())));
    Ok(s / T::from_usize_exact(m).sqrt())
}
