//! CUSUM change-point estimation and the residual-based test of a change in
//! mean against long-range dependence.
//!
//! The test locates a single break with the CUSUM estimator, removes the two
//! segment means, and fits the local Whittle estimator to the residuals. The
//! statistic `T = 2√m (Ĥ^(R) - 1/2)` is compared against the upper standard
//! normal quantile; large values point to long memory rather than a mean
//! shift.

use crate::error::{LrvError, Result};
use crate::normal;
use crate::scalar::{cmean, CompensatedSum, Scalar};
use crate::series::TimeSeries;
use crate::whittle::{fit_local_whittle_with, WhittleFit, WhittleOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct ChangePointResult<T> {
    /// First index in `1..=N-1` attaining the maximum.
    pub n_hat: usize,
    /// `|S_k - (k/N) S_N|` for `k = 1..=N` (element `k-1`).
    pub cusum_values: Vec<T>,
    pub max_value: T,
}

impl<T: Scalar> ChangePointResult<T> {
    /// CUSUM value at 1-based index `k`.
    pub fn value_at(&self, k: usize) -> T {
        self.cusum_values[k - 1]
    }
}

/// `n̂ = min{k : |S_k - (k/N) S_N| = max_s |S_s - (s/N) S_N|}`.
///
/// Partial sums are taken after subtracting `X_1`, which the statistic does
/// not depend on and which makes a constant series produce exact zeros.
pub fn cusum_estimate<T: Scalar>(series: &TimeSeries<T>) -> Result<ChangePointResult<T>> {
    series.require_len(2)?;
    let x = series.values();
    let n = x.len();
    let origin = x[0];
    let mut acc = CompensatedSum::new();
    let partial: Vec<T> = x
        .iter()
        .map(|&v| {
            acc.add(v - origin);
            acc.value()
        })
        .collect();
    let total = partial[n - 1];
    let nf = T::from_usize_exact(n);
    let cusum_values: Vec<T> = partial
        .iter()
        .enumerate()
        .map(|(i, &s)| (s - T::from_usize_exact(i + 1) / nf * total).abs())
        .collect();

    let mut best = 0;
    for k in 1..n - 1 {
        if cusum_values[k] > cusum_values[best] {
            best = k;
        }
    }
    debug_assert!(cusum_values[n - 1] <= cusum_values[best]);
    Ok(ChangePointResult {
        n_hat: best + 1,
        max_value: cusum_values[best],
        cusum_values,
    })
}

/// Subtracts the mean of `X_1..X_{n̂}` and of `X_{n̂+1}..X_N` from the
/// respective segments.
pub fn residualize<T: Scalar>(series: &TimeSeries<T>, n_hat: usize) -> Result<TimeSeries<T>> {
    series.require_len(2)?;
    let x = series.values();
    let max = x.len() - 1;
    if n_hat < 1 || n_hat > max {
        return Err(LrvError::BreakOutOfRange { n_hat, max });
    }
    let (head, tail) = x.split_at(n_hat);
    let (mh, mt) = (cmean(head), cmean(tail));
    let r = head
        .iter()
        .map(|&v| v - mh)
        .chain(tail.iter().map(|&v| v - mt))
        .collect();
    TimeSeries::new_demeaned(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrdTestOutcome<T> {
    pub n_hat: usize,
    pub h_hat_residual: T,
    /// `2√m (Ĥ^(R) - 1/2)`.
    pub statistic: T,
    /// `1 - Φ(statistic)`.
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub m: usize,
    pub fit: WhittleFit<T>,
}

/// Upper-tail p-value and the decision `statistic > Φ^{-1}(1-α)`.
pub fn decide(statistic: f64, alpha: f64) -> Result<(f64, bool)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LrvError::InvalidAlpha(alpha));
    }
    let p = normal::upper_tail(statistic);
    Ok((p, statistic > normal::quantile(1.0 - alpha)))
}

pub fn lrd_test<T: Scalar>(series: &TimeSeries<T>, m: usize, alpha: f64, bounds: (f64, f64)) -> Result<LrdTestOutcome<T>> {
    lrd_test_with(series, m, alpha, &WhittleOptions::with_bounds(bounds.0, bounds.1))
}

pub fn lrd_test_with<T: Scalar>(
    series: &TimeSeries<T>,
    m: usize,
    alpha: f64,
    options: &WhittleOptions,
) -> Result<LrdTestOutcome<T>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LrvError::InvalidAlpha(alpha));
    }
    let cp = cusum_estimate(series)?;
    let residuals = residualize(series, cp.n_hat)?;
    let fit = fit_local_whittle_with(&residuals, m, options)?;
    let statistic = fit.normalized;
    let (p_value, reject) = decide(statistic.to_f64().unwrap_or(f64::NAN), alpha)?;
    Ok(LrdTestOutcome {
        n_hat: cp.n_hat,
        h_hat_residual: fit.h_hat,
        statistic,
        p_value,
        reject,
        alpha,
        m: fit.m,
        fit,
    })
}
