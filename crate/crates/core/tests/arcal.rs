//! AR(1) calibration and forecast clamping.

use chrono::NaiveDate;
use gvar_core::arcal::{
    calibrate, fit_ar1, forecast_one_step, ARCoefficients, ARFit, Forecast, VAR_FLOOR,
};
use gvar_core::windows::LocalEstimates;
use gvar_core::GvarError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn day(i: usize) -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Duration::days(i as i64)
}

fn recursion(a: f64, b: f64, start: f64, n: usize) -> Vec<f64> {
    let mut out = vec![start];
    while out.len() < n {
        let prev = *out.last().unwrap();
        out.push(a + b * prev);
    }
    out
}

fn line(intercept: f64, slope: f64) -> ARFit {
    ARFit {
        intercept,
        slope,
        residuals: vec![],
        n_pairs: 2,
    }
}

fn estimates(r: f64, lo: f64, hi: f64) -> LocalEstimates {
    LocalEstimates {
        date: day(0),
        r_hat: r,
        var_lo_hat: lo,
        var_hi_hat: hi,
    }
}

#[test]
fn exact_examples() {
    let fit = fit_ar1(&recursion(0.2, 0.9, 1.0, 40)).unwrap();
    assert!((fit.intercept - 0.2).abs() < 1e-10 && (fit.slope - 0.9).abs() < 1e-10);
    let fit = fit_ar1(&[1.0, 2.0, 3.0]).unwrap();
    assert!((fit.slope - 1.0).abs() < 1e-12 && (fit.intercept - 1.0).abs() < 1e-12);
    assert_eq!(fit.n_pairs, 2);
}

#[test]
fn noisy_fit_within_three_standard_errors() {
    let (a, b) = (0.3, 0.6);
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut y = vec![a / (1.0 - b)];
        for _ in 1..500 {
            let e: f64 = StandardNormal.sample(&mut rng);
            y.push(a + b * y.last().unwrap() + 0.5 * e);
        }
        let fit = fit_ar1(&y).unwrap();

        // Normal equations in raw sums, with classical OLS standard errors.
        let (x, z) = (&y[..499], &y[1..]);
        let n = 499.0;
        let sx: f64 = x.iter().sum();
        let sz: f64 = z.iter().sum();
        let sxx: f64 = x.iter().map(|v| v * v).sum();
        let sxz: f64 = x.iter().zip(z).map(|(p, q)| p * q).sum();
        let det = n * sxx - sx * sx;
        let slope = (n * sxz - sx * sz) / det;
        let intercept = (sxx * sz - sx * sxz) / det;
        let rss: f64 = x
            .iter()
            .zip(z)
            .map(|(p, q)| (q - intercept - slope * p).powi(2))
            .sum();
        let s2 = rss / (n - 2.0);
        let se_slope = (s2 * n / det).sqrt();
        let se_intercept = (s2 * sxx / det).sqrt();

        assert!((fit.slope - slope).abs() < 1e-10 && (fit.intercept - intercept).abs() < 1e-10);
        assert!((fit.slope - b).abs() <= 3.0 * se_slope, "seed {seed}");
        assert!(
            (fit.intercept - a).abs() <= 3.0 * se_intercept,
            "seed {seed}"
        );
    }
}

#[test]
fn constant_inputs_are_singular() {
    assert!(matches!(
        fit_ar1(&[2.0; 10]),
        Err(GvarError::SingularFit { .. })
    ));
    let history: Vec<LocalEstimates> = (0..10)
        .map(|i| LocalEstimates {
            date: day(i),
            ..estimates(1.0, 0.5, 2.0)
        })
        .collect();
    assert!(matches!(
        calibrate(&history),
        Err(GvarError::SingularFit { series: "return" })
    ));
    assert!(fit_ar1(&[1.0, 2.0]).is_err());
}

#[test]
fn calibrate_recovers_three_recursions() {
    let r = recursion(0.05, 0.5, 1.0, 60);
    let hi = recursion(0.4, 0.8, 5.0, 60);
    let lo = recursion(0.1, 0.7, 0.05, 60);
    let history: Vec<LocalEstimates> = (0..60)
        .map(|i| LocalEstimates {
            date: day(i),
            r_hat: r[i],
            var_lo_hat: lo[i],
            var_hi_hat: hi[i],
        })
        .collect();
    let c = calibrate(&history).unwrap();
    for (fit, (a, b)) in [
        (&c.mean_fit, (0.05, 0.5)),
        (&c.var_hi_fit, (0.4, 0.8)),
        (&c.var_lo_fit, (0.1, 0.7)),
    ] {
        assert!((fit.intercept - a).abs() < 1e-10 && (fit.slope - b).abs() < 1e-10);
    }
}

#[test]
fn forecast_examples() {
    let latest = estimates(0.3, 0.4, 2.5);
    let flat = ARCoefficients {
        mean_fit: line(0.1, 0.0),
        var_hi_fit: line(3.0, 0.0),
        var_lo_fit: line(0.6, 0.0),
    };
    let f = forecast_one_step(&flat, &latest);
    assert_eq!((f.r_tilde, f.var_lo_tilde, f.var_hi_tilde), (0.1, 0.6, 3.0));

    let identity = ARCoefficients {
        mean_fit: line(0.0, 1.0),
        var_hi_fit: line(0.0, 1.0),
        var_lo_fit: line(0.0, 1.0),
    };
    let f = forecast_one_step(&identity, &latest);
    assert_eq!((f.r_tilde, f.var_lo_tilde, f.var_hi_tilde), (0.3, 0.4, 2.5));
    assert_eq!(f.date, latest.date);

    let crossed = ARCoefficients {
        mean_fit: line(0.0, 1.0),
        var_hi_fit: line(1.5, 0.0),
        var_lo_fit: line(2.0, 0.0),
    };
    let f = forecast_one_step(&crossed, &latest);
    assert_eq!((f.var_lo_tilde, f.var_hi_tilde), (1.5, 1.5));
}

proptest! {
    #[test]
    fn residual_orthogonality(seed in 0u64..10_000, n in 3usize..300, scale in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = (0..n).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let fit = fit_ar1(&y).unwrap();
        let e0: f64 = fit.residuals.iter().sum();
        let e1: f64 = fit.residuals.iter().zip(&y[..n - 1]).map(|(e, v)| e * v).sum();
        prop_assert!(e0.abs() <= 1e-8 * scale);
        prop_assert!(e1.abs() <= 1e-8 * scale * scale);
        prop_assert!((e0 / fit.n_pairs as f64).abs() <= 1e-9 * scale);
    }

    #[test]
    fn affine_equivariance(seed in 0u64..10_000, c in prop_oneof![-10.0f64..-0.1, 0.1f64..10.0], d in -10.0f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = (0..50).map(|_| rng.random_range(-2.0..2.0)).collect();
        let base = fit_ar1(&y).unwrap();
        let moved = fit_ar1(&y.iter().map(|v| c * v + d).collect::<Vec<_>>()).unwrap();
        prop_assert!((moved.slope - base.slope).abs() <= 1e-9);
        let want = c * base.intercept + d * (1.0 - base.slope);
        prop_assert!((moved.intercept - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn forecasts_are_ordered(
        a in prop::array::uniform6(-1e6f64..1e6),
        latest in prop::array::uniform3(-1e3f64..1e3),
    ) {
        let coeffs = ARCoefficients {
            mean_fit: line(a[0], a[1]),
            var_hi_fit: line(a[2], a[3]),
            var_lo_fit: line(a[4], a[5]),
        };
        let f = forecast_one_step(&coeffs, &estimates(latest[0], latest[1], latest[2]));
        prop_assert!(f.var_lo_tilde >= VAR_FLOOR);
        prop_assert!(f.var_lo_tilde <= f.var_hi_tilde);
    }

    #[test]
    fn clamping_handles_non_finite(lo in prop_oneof![Just(f64::NAN), Just(f64::NEG_INFINITY), -5.0f64..5.0], hi in prop_oneof![Just(f64::NAN), -5.0f64..5.0]) {
        let f = Forecast::clamped(day(0), 0.0, lo, hi);
        prop_assert!(f.var_lo_tilde > 0.0 && f.var_lo_tilde <= f.var_hi_tilde);
    }
}
