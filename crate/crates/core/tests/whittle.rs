use lrvkit::spectral::bandwidth_from_exponent;
use lrvkit::{
    fit_local_whittle, nu_weights, periodogram, simulate, weighted_clt_statistic, whittle_objective, LrvError, Ordinates,
    ProcessSpec, Series,
};
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

const BOUNDS: (f64, f64) = (0.05, 0.95);

/// `(1/m) Σ (log l - log(m!)/m)²` with the centring constant from the
/// log-gamma function.
fn nu_second_moment(m: usize) -> f64 {
    let c = ln_gamma(m as f64 + 1.0) / m as f64;
    (1..=m).map(|l| ((l as f64).ln() - c).powi(2)).sum::<f64>() / m as f64
}

fn sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

#[test]
fn objective_examples() {
    let one = Ordinates::from_parts(30, vec![0.8]).unwrap();
    for h in [0.1, 0.4, 0.9] {
        assert!((whittle_objective(&one, h).unwrap() - 0.8f64.ln()).abs() < 1e-15);
    }
    let i = vec![0.2, 1.4, 0.6, 0.9];
    let p = Ordinates::from_parts(30, i.clone()).unwrap();
    let plain = (i.iter().sum::<f64>() / 4.0).ln();
    assert!((whittle_objective(&p, 0.5).unwrap() - plain).abs() < 1e-15);
    let doubled = Ordinates::from_parts(30, i.iter().map(|v| 2.0 * v).collect()).unwrap();
    for h in [0.1, 0.5, 0.77] {
        let d = whittle_objective(&doubled, h).unwrap() - whittle_objective(&p, h).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-14);
    }
    let zero = Ordinates::from_parts(30, vec![0.0; 3]).unwrap();
    assert!(matches!(whittle_objective(&zero, 0.5), Err(LrvError::DegenerateOrdinates)));
}

#[test]
fn nu_moments_approach_one() {
    let mut last = 0.0;
    for m in [1_000, 10_000, 100_000] {
        let nu = nu_weights::<f64>(m).unwrap();
        let got = nu.values.iter().map(|v| v * v).sum::<f64>() / m as f64;
        let want = nu_second_moment(m);
        assert!((got - want).abs() < 1e-9, "m={m}: {got} vs {want}");
        assert!((got - 1.0).abs() < 0.05, "m={m}: {got}");
        assert!(got > last);
        last = got;
    }
}

#[test]
fn nu_sup_norm_is_logarithmic() {
    let ms = (2..=400).chain((0..=40).map(|k| (400.0 * 250f64.powf(k as f64 / 40.0)) as usize));
    for m in ms {
        let nu = nu_weights::<f64>(m).unwrap();
        let sup = nu.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(sup / (m as f64).ln() <= 2.0, "m={m}");
    }
}

#[test]
fn degenerate_fit_returns_lower_bound() {
    let x = Series::new(vec![1.0, -2.0, 0.5, 3.0, -1.0]).unwrap();
    let fit = fit_local_whittle(&x, 1, (0.2, 0.8)).unwrap();
    assert!(fit.degenerate);
    assert_eq!(fit.h_hat, 0.2);
}

#[test]
fn scaled_series_give_same_estimate() {
    let x = simulate(&ProcessSpec::garch11(0.5, 0.2, 0.4), 4096, 11).unwrap();
    let ten = x.map(|v| 10.0 * v).unwrap();
    for m in [10, 100, 500] {
        let a = fit_local_whittle(&x, m, BOUNDS).unwrap();
        let b = fit_local_whittle(&ten, m, BOUNDS).unwrap();
        assert!((a.h_hat - b.h_hat).abs() <= a.refine_tol, "m={m}");
    }
}

#[test]
fn white_noise_whittle_clt() {
    let n = 10_000;
    let m = bandwidth_from_exponent(n, 0.65);
    let spec = ProcessSpec::iid(1.0);
    let hs: Vec<f64> = (0..1000)
        .map(|seed| fit_local_whittle(&simulate(&spec, n, 40_000 + seed).unwrap(), m, BOUNDS).unwrap().h_hat)
        .collect();
    let mean = hs.iter().sum::<f64>() / hs.len() as f64;
    let se = sd(&hs) / (hs.len() as f64).sqrt();
    assert!((mean - 0.5).abs() < 3.0 * se, "mean {mean}, se {se}");
    let t_sd = 2.0 * (m as f64).sqrt() * sd(&hs);
    assert!((0.9..=1.1).contains(&t_sd), "sd {t_sd}");
}

#[test]
fn weighted_statistic_examples() {
    let x = Series::new((0..50).map(|t| ((t * 37) % 11) as f64).collect()).unwrap();
    assert_eq!(weighted_clt_statistic(&x, 1, 0.3).unwrap(), 0.0);
    assert!(matches!(weighted_clt_statistic(&x, 3, 0.0), Err(LrvError::InvalidF0(_))));
    let p = periodogram(&x, 6).unwrap();
    // Constant ordinates equal to f0.
    let f0 = p.ordinates[2];
    let flat = lrvkit::whittle::weighted_clt_from_ordinates(&[f0; 6], f0).unwrap();
    assert!(flat.abs() < 1e-15);
}

#[test]
fn weighted_statistic_white_noise_variance() {
    let n = 10_000;
    let m = bandwidth_from_exponent(n, 0.6);
    let spec = ProcessSpec::iid(1.0);
    let f0 = 1.0 / std::f64::consts::TAU;
    let qs: Vec<f64> = (0..1000)
        .map(|seed| weighted_clt_statistic(&simulate(&spec, n, 90_000 + seed).unwrap(), m, f0).unwrap())
        .collect();
    let var = sd(&qs).powi(2);
    assert!((0.85..=1.15).contains(&var), "variance {var}");
}

fn ordinates() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..120).prop_flat_map(|m| (Just(2 * m + 1 + m), prop::collection::vec(1e-3f64..10.0, m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_scale_equivariance((n, i) in ordinates(), c in 1e-3f64..1e3) {
        let p = Ordinates::from_parts(n, i.clone()).unwrap();
        let q = Ordinates::from_parts(n, i.iter().map(|v| c * v).collect()).unwrap();
        for k in 1..20 {
            let h = k as f64 / 20.0;
            let d = whittle_objective(&q, h).unwrap() - whittle_objective(&p, h).unwrap();
            prop_assert!((d - c.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn fit_is_scale_invariant_and_certified(
        v in prop::collection::vec(-5.0f64..5.0, 64..600),
        frac in 0.05f64..1.0,
        c in 1e-2f64..1e2,
    ) {
        let x = Series::new(v).unwrap();
        let m = ((frac * ((x.len() - 1) / 2) as f64) as usize).max(2);
        let fit = fit_local_whittle(&x, m, BOUNDS).unwrap();
        let scaled = fit_local_whittle(&x.map(|t| c * t).unwrap(), m, BOUNDS).unwrap();
        prop_assert!((fit.h_hat - scaled.h_hat).abs() <= fit.refine_tol);

        let p = periodogram(&x, m).unwrap();
        let grid_min = (0..2048)
            .map(|k| BOUNDS.0 + (BOUNDS.1 - BOUNDS.0) * k as f64 / 2047.0)
            .map(|h| whittle_objective(&p, h).unwrap())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(fit.objective <= grid_min + fit.refine_tol);
        prop_assert!(fit.h_hat >= BOUNDS.0 && fit.h_hat <= BOUNDS.1);
    }
}
