//! Value-at-risk under volatility uncertainty.
//!
//! Daily returns are modelled as G-normal `N(μ, [σ̲², σ̄²])`. The three
//! parameters are estimated from small rolling windows, forecast one step
//! ahead with AR(1) models, and turned into a robust VaR through the explicit
//! worst-case CDF. The forecasts are then backtested with the unconditional
//! coverage and independence likelihood-ratio tests.
//!
//! Modules, bottom up:
//! - [`numerics`]: normal CDF/quantile and the χ²(1) survival function.
//! - [`gnormal`]: G-function, worst-case CDF, quantile and G-VaR.
//! - [`gheat`]: finite-difference G-heat solver, an oracle for `gnormal`.
//! - [`windows`]: small-window mean and min/max variance estimators.
//! - [`arcal`]: AR(1) calibration and one-step forecasts.
//! - [`backtest`]: violation counts and likelihood-ratio tests.
//! - [`pipeline`]: ingestion, the rolling engine, grid search and reports.

pub mod arcal;
pub mod backtest;
pub mod error;
pub mod gheat;
pub mod gnormal;
pub mod numerics;
pub mod pipeline;
pub mod windows;

pub use arcal::{calibrate, fit_ar1, forecast_one_step, ARCoefficients, ARFit, Forecast};
pub use backtest::{
    build_report, count_violations, lr_ind, lr_uc, BacktestReport, ViolationCounts,
};
pub use error::{GvarError, Result};
pub use gnormal::{g_cdf, g_function, g_quantile, g_var, GNormalParams};
pub use numerics::Probability;
pub use windows::{LocalEstimates, ReturnSeries, WindowConfig};
