//! End-to-end engine: ingestion, rolling G-VaR forecasts, grid search,
//! synthetic data, the Gaussian baseline and report emission.

pub mod config;
pub mod engine;
pub mod ingest;
pub mod report;
pub mod simulate;

pub use config::ConfigOverrides;
pub use engine::{
    backtest_records, gaussian_var_baseline, grid_search, run_gvar, ArMode, EngineConfig,
    ForecastRecord, GridCell, GridSearch,
};
pub use ingest::{load_prices, load_series, parse_prices, parse_series, PriceSeries};
pub use report::{emit_report, fmt_sig6};
pub use simulate::{simulate_regime_switching, Regime, RegimeSwitching};
