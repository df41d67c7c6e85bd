//! Standard normal distribution function and quantile.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;

/// `Φ(x)`.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `1 - Φ(x)` without cancellation in the upper tail.
pub fn upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `Φ^{-1}(p)` for `p ∈ (0, 1)`.
pub fn quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}
