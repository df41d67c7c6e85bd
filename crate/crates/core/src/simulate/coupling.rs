//! Coupled-path estimates of `‖X_t - X_{t,{0}}‖_4` and `‖X_t - X_t^{(t)}‖_4`.
//!
//! Each replication draws one window of shocks covering times `-B..=t_max`
//! (`B` is the process burn-in) and an independent copy of the same window.
//! Two coupled windows are built from them:
//!
//! - the δ window swaps only the shock at time 0;
//! - the tail window swaps every shock at times `≤ 0`.
//!
//! Evaluating the process on the original and the two coupled windows gives
//! `X_t - X_{t,{0}}` and `X_t - X_t^{(t)}` for every requested lag from the
//! same draws.

use rayon::prelude::*;

use super::rng::{name_id, replication_stream, stream_rng};
use super::{ProcessSpec, Shock};
use crate::error::{LrvError, Result};
use crate::scalar::CompensatedSum;

pub const MIN_COUPLING_REPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingDiagnostics {
    pub lags: Vec<usize>,
    /// `(mean |X_t - X_{t,{0}}|⁴)^{1/4}` per lag.
    pub delta_hat_4: Vec<f64>,
    pub delta_se: Vec<f64>,
    /// `(mean |X_t - X_t^{(t)}|⁴)^{1/4}` per lag.
    pub approx_hat_4: Vec<f64>,
    pub approx_se: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    /// Least-squares slope of `log δ̂` on `log(1 + t)` over lags with a
    /// positive estimate; `None` with fewer than two such lags.
    pub delta_log_slope: Option<f64>,
    pub approx_log_slope: Option<f64>,
}

/// Estimates both coupling norms at each lag in `lags` from `reps`
/// independent replications.
pub fn coupled_paths(spec: &ProcessSpec, lags: &[usize], reps: usize, seed: u64) -> Result<CouplingDiagnostics> {
    if reps < MIN_COUPLING_REPS {
        return Err(LrvError::InsufficientReps { reps, min: MIN_COUPLING_REPS });
    }
    if lags.is_empty() {
        return Err(LrvError::InvalidSpec("at least one lag is required".into()));
    }
    let process = spec.compile()?;
    let burn = process.burn_in();
    let t_max = *lags.iter().max().unwrap_or(&0);
    let len = burn + t_max + 1;
    let origin = burn;
    let positions: Vec<usize> = lags.iter().map(|&t| origin + t).collect();
    let experiment = name_id("coupling");

    // Per replication: (δ differences, tail differences), one per lag.
    let draws: Vec<(Vec<f64>, Vec<f64>)> = (0..reps as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = stream_rng(seed, replication_stream(experiment, rep));
            let base = process.draw_shocks(&mut rng, len);
            let copy = process.draw_shocks(&mut rng, len);
            let mut delta_win: Vec<Shock> = base.clone();
            delta_win[origin] = copy[origin];
            let mut tail_win = base.clone();
            tail_win[..=origin].copy_from_slice(&copy[..=origin]);

            let x = process.values_at(&base, &positions);
            let xd = process.values_at(&delta_win, &positions);
            let xt = process.values_at(&tail_win, &positions);
            let dd = x.iter().zip(&xd).map(|(a, b)| a - b).collect();
            let dt = x.iter().zip(&xt).map(|(a, b)| a - b).collect();
            (dd, dt)
        })
        .collect();

    let mut delta_hat_4 = Vec::with_capacity(lags.len());
    let mut delta_se = Vec::with_capacity(lags.len());
    let mut approx_hat_4 = Vec::with_capacity(lags.len());
    let mut approx_se = Vec::with_capacity(lags.len());
    for k in 0..lags.len() {
        let (e, s) = l4_norm_estimate(draws.iter().map(|d| d.0[k]));
        delta_hat_4.push(e);
        delta_se.push(s);
        let (e, s) = l4_norm_estimate(draws.iter().map(|d| d.1[k]));
        approx_hat_4.push(e);
        approx_se.push(s);
    }

    Ok(CouplingDiagnostics {
        delta_log_slope: log_log_slope(lags, &delta_hat_4),
        approx_log_slope: log_log_slope(lags, &approx_hat_4),
        lags: lags.to_vec(),
        delta_hat_4,
        delta_se,
        approx_hat_4,
        approx_se,
        reps,
        seed,
    })
}

/// `(mean d⁴)^{1/4}` and its delta-method standard error.
fn l4_norm_estimate(diffs: impl Iterator<Item = f64>) -> (f64, f64) {
    let fourth: Vec<f64> = diffs.map(|d| d.powi(4)).collect();
    let n = fourth.len() as f64;
    let mut acc = CompensatedSum::new();
    for &v in &fourth {
        acc.add(v);
    }
    let mu = acc.value() / n;
    if mu <= 0.0 {
        return (0.0, 0.0);
    }
    let mut ss = CompensatedSum::new();
    for &v in &fourth {
        ss.add((v - mu) * (v - mu));
    }
    let sd = (ss.value() / (n - 1.0)).sqrt();
    (mu.powf(0.25), 0.25 * mu.powf(-0.75) * sd / n.sqrt())
}

fn log_log_slope(lags: &[usize], est: &[f64]) -> Option<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = lags
        .iter()
        .zip(est)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&t, &e)| ((1.0 + t as f64).ln(), e.ln()))
        .unzip();
    least_squares_slope(&xs, &ys)
}

/// Ordinary least-squares slope of `ys` on `xs`; `None` with fewer than two
/// points or constant `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs[..n].iter().zip(&ys[..n]).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 - 0.75 * x).collect();
        assert!((least_squares_slope(&xs, &ys).unwrap() + 0.75).abs() < 1e-14);
        assert_eq!(least_squares_slope(&[1.0], &[2.0]), None);
        assert_eq!(least_squares_slope(&[1.0, 1.0], &[2.0, 3.0]), None);
    }

    #[test]
    fn rejects_few_reps() {
        let r = coupled_paths(&ProcessSpec::iid(1.0), &[1], 99, 0);
        assert!(matches!(r, Err(LrvError::InsufficientReps { reps: 99, min: 100 })));
    }

    #[test]
    fn finite_filter_ignores_epsilon_zero_after_support() {
        let spec = ProcessSpec::moving_average(vec![1.0], 1.0);
        let d = coupled_paths(&spec, &[0, 1, 3], 200, 5).unwrap();
        assert!(d.delta_hat_4[0] > 0.0);
        assert_eq!(&d.delta_hat_4[1..], &[0.0, 0.0]);
        assert_eq!(&d.approx_hat_4[1..], &[0.0, 0.0]);
    }

    #[test]
    fn ma1_delta_matches_closed_form() {
        // X_1 - X_{1,{0}} = ψ_1 (ε_0 - ε_0'), whose L⁴ norm is ψ_1 · 12^{1/4}.
        let spec = ProcessSpec::moving_average(vec![1.0, 0.5], 1.0);
        let d = coupled_paths(&spec, &[1], 20_000, 11).unwrap();
        let exact = 0.5 * 12f64.powf(0.25);
        assert!((d.delta_hat_4[0] - exact).abs() < 4.0 * d.delta_se[0]);
        assert_eq!(d.delta_hat_4, d.approx_hat_4);
    }

    #[test]
    fn deterministic_under_thread_count() {
        let spec = ProcessSpec::garch11(0.5, 0.2, 0.4);
        let a = coupled_paths(&spec, &[1, 2], 150, 3).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| coupled_paths(&spec, &[1, 2], 150, 3).unwrap());
        assert_eq!(a, b);
    }
}
