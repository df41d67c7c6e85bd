//! Sample summaries used by the experiment runners.

use crate::error::{LrvError, Result};
use crate::normal;
use crate::scalar::CompensatedSum;

pub const HISTOGRAM_BINS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance; `None` with fewer than two samples.
    pub variance: Option<f64>,
    pub skewness: Option<f64>,
    /// Kolmogorov–Smirnov distance to the standard normal law.
    pub ks_distance: f64,
}

impl Summary {
    pub fn sd(&self) -> Option<f64> {
        self.variance.map(f64::sqrt)
    }

    /// Standard error of the mean.
    pub fn se(&self) -> Option<f64> {
        self.sd().map(|s| s / (self.count as f64).sqrt())
    }
}

pub fn summarize(samples: &[f64]) -> Summary {
    let n = samples.len();
    let mean = mean(samples);
    let (variance, skewness) = if n >= 2 {
        let mut m2 = CompensatedSum::new();
        let mut m3 = CompensatedSum::new();
        for &x in samples {
            let d = x - mean;
            m2.add(d * d);
            m3.add(d * d * d);
        }
        let nf = n as f64;
        let var = m2.value() / (nf - 1.0);
        let pop = m2.value() / nf;
        let skew = (pop > 0.0).then(|| m3.value() / nf / pop.powf(1.5));
        (Some(var), skew)
    } else {
        (None, None)
    };
    Summary {
        count: n,
        mean,
        variance,
        skewness,
        ks_distance: ks_distance_normal(samples),
    }
}

pub fn mean(samples: &[f64]) -> f64 {
    let mut s = CompensatedSum::new();
    for &x in samples {
        s.add(x);
    }
    s.value() / samples.len() as f64
}

/// `sup_x |F_n(x) - Φ(x)|`.
pub fn ks_distance_normal(samples: &[f64]) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal::cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Count per bin divided by `count · width`.
    pub density: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    /// `Σ density · width`; one up to rounding.
    pub fn mass(&self) -> f64 {
        self.density
            .iter()
            .zip(self.edges.windows(2))
            .map(|(d, e)| d * (e[1] - e[0]))
            .sum()
    }
}

/// Uniform-bin density histogram over `[min, max]` of the samples. The last
/// bin is closed on the right. A sample with no spread is centred in a bin
/// of unit width.
pub fn histogram(samples: &[f64], bins: usize) -> Result<Histogram> {
    if samples.is_empty() {
        return Err(LrvError::InsufficientReps { reps: 0, min: 1 });
    }
    if bins < 1 {
        return Err(LrvError::Config("histogram needs at least one bin".into()));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|k| lo + width * k as f64).collect();
    edges.push(hi);
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = samples.len() as f64;
    let density = counts
        .iter()
        .zip(edges.windows(2))
        .map(|(&c, e)| c as f64 / (n * (e[1] - e[0])))
        .collect();
    Ok(Histogram { edges, density, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_small_sample() {
        let s = summarize(&[1.0, 2.0, 3.0, 10.0]);
        assert_eq!(s.mean, 4.0);
        assert!((s.variance.unwrap() - 50.0 / 3.0).abs() < 1e-12);
        // Population moments: m2 = 12.5, m3 = 45.
        assert!((s.skewness.unwrap() - 45.0 / 12.5f64.powf(1.5)).abs() < 1e-12);
        let one = summarize(&[0.3]);
        assert_eq!(one.variance, None);
        assert_eq!(one.skewness, None);
        assert_eq!(one.mean, 0.3);
    }

    #[test]
    fn ks_single_point_at_zero() {
        assert!((ks_distance_normal(&[0.0]) - 0.5).abs() < 1e-15);
        let grid: Vec<f64> = (1..1000).map(|i| normal::quantile(i as f64 / 1000.0)).collect();
        assert!(ks_distance_normal(&grid) < 1.1e-3);
    }

    #[test]
    fn histogram_mass_and_counts() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 37.0).collect();
        let h = histogram(&xs, HISTOGRAM_BINS).unwrap();
        assert_eq!(h.counts.iter().sum::<usize>(), 1000);
        assert!((h.mass() - 1.0).abs() < 1e-9);
        assert_eq!(h.edges.len(), HISTOGRAM_BINS + 1);
        let flat = histogram(&[2.0; 5], 4).unwrap();
        assert!((flat.mass() - 1.0).abs() < 1e-12);
        assert!(matches!(histogram(&[], 4), Err(LrvError::InsufficientReps { .. })));
    }
}
