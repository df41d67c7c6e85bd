use std::f64::consts::{PI, TAU};

use lrvkit::spectral::{periodogram_full, periodogram_with, sample_autocovariances, Bartlett, DftMethod};
use lrvkit::{
    cosine_weights, fourier_frequencies, lrv_lag_window, lrv_smoothed_periodogram, periodogram, sample_autocovariance,
    simulate, LrvError, LrvPath, ProcessSpec, Series,
};
use proptest::prelude::*;

fn series(v: Vec<f64>) -> Series {
    Series::new(v).unwrap()
}

/// `|Σ_t X_t e^{-itω}|² / (2πn)` summed term by term.
fn naive_ordinate(x: &[f64], omega: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (t, v) in x.iter().enumerate() {
        let a = (t + 1) as f64 * omega;
        re += v * a.cos();
        im -= v * a.sin();
    }
    (re * re + im * im) / (TAU * x.len() as f64)
}

fn naive_weight(n: usize, m: usize, t: i64) -> f64 {
    (1..=m).map(|j| (t as f64 * TAU * j as f64 / n as f64).cos()).sum::<f64>() / m as f64
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn frequency_examples() {
    let w: Vec<f64> = fourier_frequencies(8, 2).unwrap();
    assert!((w[0] - PI / 4.0).abs() < 1e-15 && (w[1] - PI / 2.0).abs() < 1e-15);
    let w: Vec<f64> = fourier_frequencies(4, 1).unwrap();
    assert!((w[0] - PI / 2.0).abs() < 1e-15);
    assert!(matches!(
        fourier_frequencies::<f64>(5, 3),
        Err(LrvError::BandwidthOutOfRange { m: 3, max: 2 })
    ));
    assert!(matches!(fourier_frequencies::<f64>(1, 1), Err(LrvError::InvalidLength { .. })));
}

#[test]
fn periodogram_examples() {
    let alt = series(vec![1.0, -1.0, 1.0, -1.0]);
    assert!(periodogram(&alt, 1).unwrap().ordinates[0].abs() < 1e-15);
    let full = periodogram_full(&alt).unwrap();
    assert!((full.ordinate(2).unwrap() - 2.0 / PI).abs() < 1e-14);

    let flat = series(vec![3.7; 25]);
    for m in 1..=12 {
        assert!(periodogram(&flat, m).unwrap().ordinates.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn autocovariance_examples() {
    assert!((sample_autocovariance(&series(vec![1.0, 1.0, 1.0]), 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    let x = series(vec![1.0, 2.0, 3.0]);
    assert!((sample_autocovariance(&x, 1).unwrap() - 8.0 / 3.0).abs() < 1e-15);
    assert_eq!(sample_autocovariance(&x, 2).unwrap(), sample_autocovariance(&x, -2).unwrap());
    assert!(matches!(sample_autocovariance(&x, 3), Err(LrvError::LagOutOfRange { .. })));
}

#[test]
fn cosine_weight_examples() {
    let a = cosine_weights::<f64>(8, 2).unwrap();
    assert_eq!(a.at(0), 1.0);
    assert!(a.at(4).abs() < 1e-15);
    assert_eq!(a.at(3), a.at(-3));
}

#[test]
fn weight_product_identity() {
    for n in [32, 64] {
        for m in [2, 4] {
            let a = cosine_weights::<f64>(n, m).unwrap();
            let scale = n as f64 / (2 * m) as f64;
            for j in 1..=n as i64 {
                for l in 1..=n as i64 {
                    let lhs: f64 = (1..=n as i64).map(|t| a.at(t - j) * a.at(t - l)).sum();
                    let rhs = scale * naive_weight(n, m, j - l);
                    assert!((lhs - rhs).abs() < 1e-9, "n={n} m={m} j={j} l={l}: {lhs} vs {rhs}");
                }
            }
        }
    }
}

#[test]
fn zero_series_estimates() {
    let z = series(vec![0.0; 40]);
    for path in [LrvPath::FrequencyAverage, LrvPath::AutocovarianceWeights] {
        assert_eq!(lrv_smoothed_periodogram(&z, 5, path).unwrap().q_n, 0.0);
    }
    assert_eq!(lrv_lag_window(&z, &Bartlett, 3).unwrap(), 0.0);
}

#[test]
fn single_lag_window_is_variance() {
    let x = series(vec![0.4, -1.2, 2.0, 0.3, -0.9, 1.7]);
    let truncating = |u: f64| if u.abs() < 0.5 { 1.0 } else { 0.0 };
    let centred = x.demean();
    let g0 = sample_autocovariance(&centred, 0).unwrap();
    assert!((lrv_lag_window(&x, &truncating, 1).unwrap() - g0 / TAU).abs() < 1e-15);
}

#[test]
fn smoothed_periodogram_white_noise_mean() {
    let n = 10_000;
    let m = (n as f64).powf(0.7) as usize;
    let spec = ProcessSpec::iid(1.0);
    let qs: Vec<f64> = (0..500)
        .map(|seed| {
            let x = simulate(&spec, n, 1000 + seed).unwrap();
            lrv_smoothed_periodogram(&x, m, LrvPath::FrequencyAverage).unwrap().q_n
        })
        .collect();
    let (mean, se) = mean_and_se(&qs);
    assert!((mean - 1.0 / TAU).abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn bartlett_white_noise_mean() {
    let n = 10_000;
    let ell = (n as f64).cbrt() as usize;
    let spec = ProcessSpec::iid(1.0);
    let fs: Vec<f64> = (0..500)
        .map(|seed| lrv_lag_window(&simulate(&spec, n, 5000 + seed).unwrap(), &Bartlett, ell).unwrap())
        .collect();
    let (mean, se) = mean_and_se(&fs);
    assert!((mean - 1.0 / TAU).abs() < 3.0 * se, "mean {mean}, se {se}");
}

fn series_and_m() -> impl Strategy<Value = (Vec<f64>, usize)> {
    (5usize..400).prop_flat_map(|n| (prop::collection::vec(-50.0f64..50.0, n), 1..=(n - 1) / 2))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn two_routes_agree((v, m) in series_and_m()) {
        let x = series(v);
        let f = lrv_smoothed_periodogram(&x, m, LrvPath::FrequencyAverage).unwrap().q_n;
        let a = lrv_smoothed_periodogram(&x, m, LrvPath::AutocovarianceWeights).unwrap().q_n;
        prop_assert!((f - a).abs() <= 1e-10 * (1.0 + f.abs()), "{} vs {}", f, a);
    }

    #[test]
    fn ordinates_match_direct_sum((v, m) in series_and_m()) {
        let x = series(v);
        let centred = x.demean();
        let w: Vec<f64> = fourier_frequencies(x.len(), m).unwrap();
        for method in [DftMethod::Direct, DftMethod::Fft] {
            let p = periodogram_with(&x, m, method).unwrap();
            for (j, &i) in p.ordinates.iter().enumerate() {
                let want = naive_ordinate(centred.values(), w[j]);
                prop_assert!((i - want).abs() <= 1e-10 * (1.0 + want), "j={} {} vs {}", j + 1, i, want);
            }
        }
    }

    #[test]
    fn parseval(v in prop::collection::vec(-10.0f64..10.0, 2..300)) {
        let x = series(v).demean();
        let n = x.len();
        let full = periodogram_full(&x).unwrap();
        let lo = -(((n - 1) / 2) as i64);
        let total: f64 = (lo..=(n / 2) as i64).map(|j| full.ordinate(j).unwrap()).sum();
        let g0 = sample_autocovariances(&x).unwrap()[0];
        prop_assert!((total * TAU / n as f64 - g0).abs() <= 1e-10 * (1.0 + g0));
    }

    #[test]
    fn mean_shift_leaves_ordinates((v, m) in series_and_m(), c in -1e3f64..1e3) {
        let x = series(v);
        let shifted = x.map(|t| t + c).unwrap();
        let (p, q) = (periodogram(&x, m).unwrap(), periodogram(&shifted, m).unwrap());
        for (a, b) in p.ordinates.iter().zip(&q.ordinates) {
            prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{} vs {}", a, b);
        }
    }

    #[test]
    fn scaling_is_quadratic((v, m) in series_and_m(), c in 0.01f64..100.0) {
        let x = series(v);
        let scaled = x.map(|t| c * t).unwrap();
        for path in [LrvPath::FrequencyAverage, LrvPath::AutocovarianceWeights] {
            let q = lrv_smoothed_periodogram(&x, m, path).unwrap().q_n;
            let qc = lrv_smoothed_periodogram(&scaled, m, path).unwrap().q_n;
            prop_assert!((qc - c * c * q).abs() <= 1e-10 * (1.0 + c * c * q));
        }
    }

    #[test]
    fn autocovariance_symmetry(v in prop::collection::vec(-5.0f64..5.0, 2..60), h in 0i64..60) {
        let x = series(v);
        prop_assume!(h < x.len() as i64);
        prop_assert_eq!(sample_autocovariance(&x, h).unwrap(), sample_autocovariance(&x, -h).unwrap());
        prop_assert!(sample_autocovariance(&x, 0).unwrap() >= 0.0);
    }
}

#[test]
fn single_precision_estimates_track_double() {
    let x = simulate(&ProcessSpec::garch11(0.5, 0.2, 0.4), 2000, 7).unwrap();
    let x32 = lrvkit::Series32::new(x.values().iter().map(|&v| v as f32).collect()).unwrap();
    let q64 = lrv_smoothed_periodogram(&x, 80, LrvPath::FrequencyAverage).unwrap().q_n;
    let q32 = lrv_smoothed_periodogram(&x32, 80, LrvPath::FrequencyAverage).unwrap().q_n;
    assert!((q32 as f64 - q64).abs() < 1e-4 * q64);
}
