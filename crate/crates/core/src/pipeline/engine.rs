//! Rolling G-VaR forecasting, the Gaussian baseline and the `(K, L)` grid search.
//!
//! A forecast for position `i` uses only returns at positions `< i`: the
//! local estimates at the `N` dates `i − N, …, i − 1` are calibrated with
//! AR(1) fits, the fits are applied to the estimates at `i − 1`, and the
//! resulting G-normal parameters give the VaR for `Z_i`.

use std::ops::RangeInclusive;

use chrono::NaiveDate;
use rayon::prelude::*;

use crate::arcal::{calibrate, forecast_one_step, ARCoefficients, Forecast};
use crate::backtest::{build_report, is_violation, BacktestReport};
use crate::error::{GvarError, Result};
use crate::gnormal::{g_var, GNormalParams};
use crate::numerics::std_normal_quantile;
use crate::windows::{
    mean, rolling_estimates, sample_variance, LocalEstimates, ReturnSeries, WindowConfig,
};

/// How the AR(1) coefficients are obtained across forecast dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArMode {
    /// Refit on the trailing `N` estimates before every forecast.
    #[default]
    Daily,
    /// Fit once before the first forecast date and hold the coefficients.
    Fixed,
    /// No fit: forecast the latest estimates unchanged.
    Identity,
}

impl std::str::FromStr for ArMode {
    type Err = GvarError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "daily" => Ok(ArMode::Daily),
            "fixed" => Ok(ArMode::Fixed),
            "identity" => Ok(ArMode::Identity),
            other => Err(GvarError::Config(format!(
                "unknown AR mode `{other}` (expected daily, fixed or identity)"
            ))),
        }
    }
}

impl std::fmt::Display for ArMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ArMode::Daily => "daily",
            ArMode::Fixed => "fixed",
            ArMode::Identity => "identity",
        })
    }
}

/// Engine settings.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub alpha: f64,
    pub window: WindowConfig,
    /// First forecast date (inclusive); defaults to the first feasible one.
    pub start: Option<NaiveDate>,
    /// Last forecast date (inclusive).
    pub end: Option<NaiveDate>,
    /// Keep only the last `n` forecast dates of the selected range.
    pub last: Option<usize>,
    pub k_range: RangeInclusive<usize>,
    pub l_range: RangeInclusive<usize>,
    pub ar_mode: ArMode,
    pub baseline: bool,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            alpha: 0.05,
            window: WindowConfig {
                windows: 5,
                width: 10,
                history: 100,
            },
            start: None,
            end: None,
            last: None,
            k_range: 5..=15,
            l_range: 5..=15,
            ar_mode: ArMode::Daily,
            baseline: false,
            seed: 0,
        }
    }
}

impl EngineConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 0.5) {
            return Err(GvarError::Config(format!(
                "alpha must lie in (0, 0.5], got {}",
                self.alpha
            )));
        }
        self.window.validate()?;
        if self.k_range.is_empty() || *self.k_range.start() < 1 {
            return Err(GvarError::Config(format!(
                "invalid K range {:?}",
                self.k_range
            )));
        }
        if self.l_range.is_empty() || *self.l_range.start() < 2 {
            return Err(GvarError::Config(format!(
                "invalid L range {:?}",
                self.l_range
            )));
        }
        if let (Some(s), Some(e)) = (self.start, self.end) {
            if s > e {
                return Err(GvarError::Config(format!("start {s} is after end {e}")));
            }
        }
        if self.last == Some(0) {
            return Err(GvarError::Config("`last` must be positive".into()));
        }
        Ok(())
    }

    /// Same settings with window geometry `(K, L)`.
    pub fn with_windows(&self, windows: usize, width: usize) -> Self {
        EngineConfig {
            window: WindowConfig {
                windows,
                width,
                ..self.window
            },
            ..self.clone()
        }
    }

    /// First position that can be forecast under this configuration.
    pub fn first_target(&self) -> usize {
        let span = self.window.estimation_span();
        match self.ar_mode {
            ArMode::Identity => span,
            ArMode::Daily | ArMode::Fixed => span - 1 + self.window.history,
        }
    }

    /// Forecast positions selected by the date range and `last`.
    pub fn targets(&self, series: &ReturnSeries, first: usize) -> Result<RangeInclusive<usize>> {
        let required = first + 1;
        if series.len() < required {
            return Err(GvarError::InsufficientHistory {
                required,
                available: series.len(),
            });
        }
        let dates = series.dates();
        let mut lo = first;
        let mut hi = series.len() - 1;
        if let Some(start) = self.start {
            let pos = dates.partition_point(|d| *d < start);
            if pos < first {
                // Counted as observations before the first forecast date.
                return Err(GvarError::InsufficientHistory {
                    required: first,
                    available: pos,
                });
            }
            lo = pos;
        }
        if let Some(end) = self.end {
            hi = match dates.partition_point(|d| *d <= end) {
                0 => return Err(GvarError::Config(format!("no data on or before {end}"))),
                n => n - 1,
            };
        }
        if let Some(n) = self.last {
            lo = lo.max((hi + 1).saturating_sub(n));
        }
        if lo > hi {
            return Err(GvarError::Config(
                "the configured date range selects no forecast dates".into(),
            ));
        }
        Ok(lo..=hi)
    }
}

/// Forecast and outcome for one date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastRecord {
    /// Date of the forecast return.
    pub date: NaiveDate,
    pub forecast: Forecast,
    pub g_var: f64,
    pub realized_return: f64,
}

impl ForecastRecord {
    pub fn violation(&self) -> bool {
        is_violation(self.realized_return, self.g_var)
    }
}

fn record_for(
    date: NaiveDate,
    forecast: Forecast,
    alpha: f64,
    realized: f64,
) -> Result<ForecastRecord> {
    let params = GNormalParams::from_variances(
        forecast.r_tilde,
        forecast.var_lo_tilde,
        forecast.var_hi_tilde,
    )?;
    Ok(ForecastRecord {
        date,
        forecast,
        g_var: g_var(alpha, &params)?,
        realized_return: realized,
    })
}

/// Rolling G-VaR forecasts over the configured date range.
pub fn run_gvar(series: &ReturnSeries, cfg: &EngineConfig) -> Result<Vec<ForecastRecord>> {
    cfg.validate()?;
    let targets = cfg.targets(series, cfg.first_target())?;
    let win = cfg.window;
    let n_hist = win.history;

    // Estimates at positions first_est..=last target − 1.
    let first_est = match cfg.ar_mode {
        ArMode::Identity => targets.start() - 1,
        _ => targets.start() - n_hist,
    };
    let estimates = rolling_estimates(series, first_est, targets.end() - 1, &win)?;
    let at = |pos: usize| -> &LocalEstimates { &estimates[pos - first_est] };
    let history = |target: usize| -> &[LocalEstimates] {
        &estimates[target - n_hist - first_est..target - first_est]
    };

    let fixed: Option<ARCoefficients> = match cfg.ar_mode {
        ArMode::Fixed => Some(calibrate(history(*targets.start()))?),
        _ => None,
    };

    let values = series.values();
    let dates = series.dates();
    targets
        .into_par_iter()
        .map(|i| {
            let latest = at(i - 1);
            let forecast = match (cfg.ar_mode, &fixed) {
                (ArMode::Identity, _) => Forecast::persistent(latest),
                (ArMode::Fixed, Some(coeffs)) => forecast_one_step(coeffs, latest),
                _ => forecast_one_step(&calibrate(history(i))?, latest),
            };
            record_for(dates[i], forecast, cfg.alpha, values[i])
        })
        .collect()
}

/// Rolling Gaussian VaR: mean `m` and sample deviation `s` of the trailing `N`
/// returns, `VaR = −(m + s·Φ⁻¹(α))`.
pub fn gaussian_var_baseline(
    series: &ReturnSeries,
    cfg: &EngineConfig,
) -> Result<Vec<ForecastRecord>> {
    cfg.validate()?;
    let n = cfg.window.history;
    let targets = cfg.targets(series, n)?;
    let z_alpha = std_normal_quantile(cfg.alpha)?;
    let values = series.values();
    let dates = series.dates();
    targets
        .into_par_iter()
        .map(|i| {
            let window = &values[i - n..i];
            let (m, var) = (mean(window), sample_variance(window));
            let var_forecast = -(m + var.sqrt() * z_alpha);
            Ok(ForecastRecord {
                date: dates[i],
                forecast: Forecast::clamped(dates[i - 1], m, var, var),
                g_var: var_forecast,
                realized_return: values[i],
            })
        })
        .collect()
}

/// Backtest of a forecast sequence.
pub fn backtest_records(records: &[ForecastRecord], alpha: f64) -> Result<BacktestReport> {
    let returns: Vec<f64> = records.iter().map(|r| r.realized_return).collect();
    let vars: Vec<f64> = records.iter().map(|r| r.g_var).collect();
    build_report(&returns, &vars, alpha)
}

/// Score of one `(K, L)` cell on the validation segment.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub windows: usize,
    pub width: usize,
    pub outcome: std::result::Result<BacktestReport, String>,
}

impl GridCell {
    /// `|α̂ − α|`, or `None` if the cell failed.
    pub fn coverage_error(&self) -> Option<f64> {
        self.outcome
            .as_ref()
            .ok()
            .map(|r| (r.alpha_hat.get() - r.alpha.get()).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearch {
    pub best: (usize, usize),
    pub cells: Vec<GridCell>,
}

/// Orders cells by `|α̂ − α|`, then larger coverage p-value, then smaller K, then smaller L.
pub fn better_cell(a: &GridCell, b: &GridCell) -> std::cmp::Ordering {
    let key = |c: &GridCell| {
        let r = c
            .outcome
            .as_ref()
            .expect("only successful cells are ranked");
        ((r.alpha_hat.get() - r.alpha.get()).abs(), r.lr_uc.get())
    };
    let (ea, pa) = key(a);
    let (eb, pb) = key(b);
    ea.total_cmp(&eb)
        .then(pb.total_cmp(&pa))
        .then(a.windows.cmp(&b.windows))
        .then(a.width.cmp(&b.width))
}

/// Evaluates every `(K, L)` in `k_range × l_range` on the configured
/// validation range and selects the best cell.
///
/// All cells are scored on the same forecast dates: the range starts no
/// earlier than the first date feasible for the largest K and L.
pub fn grid_search(series: &ReturnSeries, cfg: &EngineConfig) -> Result<GridSearch> {
    cfg.validate()?;
    let widest = cfg.with_windows(*cfg.k_range.end(), *cfg.l_range.end());
    let common = widest.targets(series, widest.first_target())?;
    let mut shared = cfg.clone();
    shared.start = Some(series.dates()[*common.start()]);
    shared.end = Some(series.dates()[*common.end()]);
    shared.last = None;

    let pairs: Vec<(usize, usize)> = cfg
        .k_range
        .clone()
        .flat_map(|k| cfg.l_range.clone().map(move |l| (k, l)))
        .collect();
    let cells: Vec<GridCell> = pairs
        .into_par_iter()
        .map(|(k, l)| {
            let cell_cfg = shared.with_windows(k, l);
            let outcome = run_gvar(series, &cell_cfg)
                .and_then(|records| backtest_records(&records, cfg.alpha))
                .map_err(|e| e.to_string());
            if let Err(msg) = &outcome {
                log::warn!("grid cell K={k}, L={l} skipped: {msg}");
            }
            GridCell {
                windows: k,
                width: l,
                outcome,
            }
        })
        .collect();

    let best = cells
        .iter()
        .filter(|c| c.outcome.is_ok())
        .min_by(|a, b| better_cell(a, b))
        .map(|c| (c.windows, c.width))
        .ok_or_else(|| GvarError::Config("every grid cell failed".into()))?;
    Ok(GridSearch { best, cells })
}
