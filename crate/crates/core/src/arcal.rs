//! AR(1) calibration of the estimated parameter series and one-step forecasts.

use chrono::NaiveDate;

use crate::error::{GvarError, Result};
use crate::windows::LocalEstimates;

/// Lower bound applied to forecast variances.
pub const VAR_FLOOR: f64 = 1e-8;

/// Least-squares fit of `y_t = intercept + slope·y_{t−1} + ε_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ARFit {
    pub intercept: f64,
    pub slope: f64,
    pub residuals: Vec<f64>,
    pub n_pairs: usize,
}

impl ARFit {
    pub fn predict(&self, previous: f64) -> f64 {
        self.intercept + self.slope * previous
    }
}

/// Fits for the return `(γ₀, γ₁)`, maximal variance `(α₀, α₁)` and minimal variance `(β₀, β₁)` series.
#[derive(Debug, Clone, PartialEq)]
pub struct ARCoefficients {
    pub mean_fit: ARFit,
    pub var_hi_fit: ARFit,
    pub var_lo_fit: ARFit,
}

/// One-step-ahead G-normal parameters. `date` is the as-of date of the
/// estimates the forecast was built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Forecast {
    pub date: NaiveDate,
    pub r_tilde: f64,
    pub var_hi_tilde: f64,
    pub var_lo_tilde: f64,
}

impl Forecast {
    /// Floors both variances at [`VAR_FLOOR`] and caps the minimal variance at the maximal one.
    pub fn clamped(date: NaiveDate, r_tilde: f64, var_lo: f64, var_hi: f64) -> Self {
        let var_hi_tilde = if var_hi.is_nan() {
            VAR_FLOOR
        } else {
            var_hi.max(VAR_FLOOR)
        };
        let var_lo_tilde = if var_lo.is_nan() {
            VAR_FLOOR
        } else {
            var_lo.max(VAR_FLOOR)
        };
        Forecast {
            date,
            r_tilde,
            var_hi_tilde,
            var_lo_tilde: var_lo_tilde.min(var_hi_tilde),
        }
    }

    /// Forecast equal to the latest estimates (identity dynamics).
    pub fn persistent(latest: &LocalEstimates) -> Self {
        Self::clamped(
            latest.date,
            latest.r_hat,
            latest.var_lo_hat,
            latest.var_hi_hat,
        )
    }

    pub fn sigma_lo(&self) -> f64 {
        self.var_lo_tilde.sqrt()
    }

    pub fn sigma_hi(&self) -> f64 {
        self.var_hi_tilde.sqrt()
    }
}

/// Ordinary least squares of `values[t]` on `(1, values[t−1])` over the `N − 1` consecutive pairs.
pub fn fit_ar1(values: &[f64]) -> Result<ARFit> {
    fit_named(values, "input")
}

fn fit_named(values: &[f64], series: &'static str) -> Result<ARFit> {
    let n = values.len();
    if n < 3 {
        return Err(GvarError::Contract(format!(
            "AR(1) fit of {series} series needs at least 3 values, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(GvarError::domain(format!(
            "non-finite value in {series} series"
        )));
    }
    let lagged = &values[..n - 1];
    let current = &values[1..];
    let pairs = (n - 1) as f64;
    let mean_lag = lagged.iter().sum::<f64>() / pairs;
    let mean_cur = current.iter().sum::<f64>() / pairs;

    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&x, &y) in lagged.iter().zip(current) {
        let dx = x - mean_lag;
        sxx += dx * dx;
        sxy += dx * (y - mean_cur);
    }
    let scale = lagged.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let noise = 4.0 * f64::EPSILON * scale;
    if sxx <= pairs * noise * noise {
        return Err(GvarError::SingularFit { series });
    }

    let slope = sxy / sxx;
    let intercept = mean_cur - slope * mean_lag;
    let residuals = lagged
        .iter()
        .zip(current)
        .map(|(&x, &y)| y - intercept - slope * x)
        .collect();
    Ok(ARFit {
        intercept,
        slope,
        residuals,
        n_pairs: n - 1,
    })
}

/// Three independent AR(1) fits over a calibration history.
pub fn calibrate(history: &[LocalEstimates]) -> Result<ARCoefficients> {
    let column = |f: fn(&LocalEstimates) -> f64| history.iter().map(f).collect::<Vec<_>>();
    Ok(ARCoefficients {
        mean_fit: fit_named(&column(|e| e.r_hat), "return")?,
        var_hi_fit: fit_named(&column(|e| e.var_hi_hat), "maximal variance")?,
        var_lo_fit: fit_named(&column(|e| e.var_lo_hat), "minimal variance")?,
    })
}

/// Applies each fitted line to the latest estimates, then clamps the variances.
pub fn forecast_one_step(coeffs: &ARCoefficients, latest: &LocalEstimates) -> Forecast {
    Forecast::clamped(
        latest.date,
        coeffs.mean_fit.predict(latest.r_hat),
        coeffs.var_lo_fit.predict(latest.var_lo_hat),
        coeffs.var_hi_fit.predict(latest.var_hi_hat),
    )
}
