//! Long-run variance estimation for nonlinear time series.
//!
//! - [`spectral`]: Fourier-frequency periodogram, sample autocovariances, the
//!   smoothed-periodogram estimator `Q_n` of `f(0)` (two equivalent routes)
//!   and a lag-window estimator for comparison.
//! - [`whittle`]: local Whittle estimation of the Hurst parameter.
//! - [`changepoint`]: CUSUM break estimation and the residual-based test of
//!   a change in mean against long-range dependence.
//! - [`simulate`]: seeded generators for iid, linear, GARCH(1,1) and
//!   stochastic-volatility Bernoulli shifts, plus coupling diagnostics.
//! - [`montecarlo`]: experiment runner for CLT checks, empirical size tables
//!   and density samples.
//!
//! Estimators are generic over [`Scalar`] (`f32` or `f64`). The aliases
//! below name the `f64` instantiations used throughout the simulation code.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod changepoint;
pub mod error;
pub mod montecarlo;
pub mod normal;
pub mod optimize;
pub mod record;
pub mod scalar;
pub mod series;
pub mod simulate;
pub mod spectral;
pub mod whittle;

pub use changepoint::{cusum_estimate, lrd_test, lrd_test_with, residualize, ChangePointResult, LrdTestOutcome};
pub use error::{LrvError, Result};
pub use scalar::Scalar;
pub use series::{parse_series, read_series, write_series, TimeSeries};
pub use simulate::{simulate, ProcessSpec};
pub use spectral::{
    cosine_weights, fourier_frequencies, lrv_lag_window, lrv_smoothed_periodogram, periodogram,
    sample_autocovariance, CosineWeights, LrvPath, PeriodogramOrdinates, SpectralEstimate,
};
pub use whittle::{
    fit_local_whittle, fit_local_whittle_with, nu_weights, weighted_clt_statistic, whittle_objective, NuWeights,
    WhittleFit, WhittleOptions,
};

pub type Series = TimeSeries<f64>;
pub type Series32 = TimeSeries<f32>;
pub type Ordinates = PeriodogramOrdinates<f64>;
pub type Estimate = SpectralEstimate<f64>;
pub type Fit = WhittleFit<f64>;
pub type Fit32 = WhittleFit<f32>;
pub type ChangePoint = ChangePointResult<f64>;
pub type TestOutcome = LrdTestOutcome<f64>;
