//! Python bindings for `gvar_core`.
//!
//! Series cross the boundary as plain lists of floats; dates, where needed,
//! as `YYYY-MM-DD` strings. Engine errors surface as `gvar.GvarError`, a
//! subclass of `ValueError`.

use std::cell::RefCell;

use chrono::NaiveDate;
use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gvar_core::gheat::{self, GridSpec};
use gvar_core::pipeline::{self, ArMode, EngineConfig, RegimeSwitching};
use gvar_core::windows::{self, ReturnSeries, WindowConfig};
use gvar_core::{backtest, gnormal, GvarError as CoreError};

create_exception!(gvar, GvarError, PyValueError);

fn to_py(err: CoreError) -> PyErr {
    match err {
        CoreError::Io(e) => PyIOError::new_err(e.to_string()),
        other => GvarError::new_err(other.to_string()),
    }
}

/// Parameters of a G-normal law `N(mu, [sigma_lo^2, sigma_hi^2])`.
#[pyclass(name = "GNormalParams", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyGNormalParams {
    inner: gnormal::GNormalParams,
}

#[pymethods]
impl PyGNormalParams {
    #[new]
    fn new(mu: f64, sigma_lo: f64, sigma_hi: f64) -> PyResult<Self> {
        let inner = gnormal::GNormalParams::new(mu, sigma_lo, sigma_hi).map_err(to_py)?;
        Ok(PyGNormalParams { inner })
    }

    #[staticmethod]
    fn from_variances(mu: f64, var_lo: f64, var_hi: f64) -> PyResult<Self> {
        let inner = gnormal::GNormalParams::from_variances(mu, var_lo, var_hi).map_err(to_py)?;
        Ok(PyGNormalParams { inner })
    }

    #[getter]
    fn mu(&self) -> f64 {
        self.inner.mu()
    }

    #[getter]
    fn sigma_lo(&self) -> f64 {
        self.inner.sigma_lo()
    }

    #[getter]
    fn sigma_hi(&self) -> f64 {
        self.inner.sigma_hi()
    }

    fn __repr__(&self) -> String {
        format!(
            "GNormalParams(mu={}, sigma_lo={}, sigma_hi={})",
            self.inner.mu(),
            self.inner.sigma_lo(),
            self.inner.sigma_hi()
        )
    }
}

#[pyfunction]
fn g_function(a: f64, params: &PyGNormalParams) -> PyResult<f64> {
    gnormal::g_function(a, &params.inner).map_err(to_py)
}

#[pyfunction]
fn g_cdf(x: f64, params: &PyGNormalParams) -> PyResult<f64> {
    gnormal::g_cdf(x, &params.inner).map_err(to_py)
}

#[pyfunction]
fn g_quantile(alpha: f64, params: &PyGNormalParams) -> PyResult<f64> {
    gnormal::g_quantile(alpha, &params.inner).map_err(to_py)
}

#[pyfunction]
fn g_var(alpha: f64, params: &PyGNormalParams) -> PyResult<f64> {
    gnormal::g_var(alpha, &params.inner).map_err(to_py)
}

/// Worst-case CDF from the finite-difference G-heat solver.
#[pyfunction]
#[pyo3(signature = (x, params, nodes = gheat::DEFAULT_NODES))]
fn numeric_g_cdf(x: f64, params: &PyGNormalParams, nodes: usize) -> PyResult<f64> {
    let spec = GridSpec::symmetric(&params.inner, gheat::DEFAULT_HALF_WIDTH, nodes);
    gheat::numeric_g_cdf(x, &params.inner, &spec).map_err(to_py)
}

/// Sublinear expectation of `phi(xi)` by solving the G-heat equation.
#[pyfunction]
#[pyo3(signature = (phi, params, nodes = gheat::DEFAULT_NODES))]
fn expectation_of(phi: &Bound<'_, PyAny>, params: &PyGNormalParams, nodes: usize) -> PyResult<f64> {
    let spec = GridSpec::symmetric(&params.inner, gheat::DEFAULT_HALF_WIDTH, nodes);
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let payoff = |z: f64| -> f64 {
        if failure.borrow().is_some() {
            return 0.0;
        }
        match phi.call1((z,)).and_then(|v| v.extract::<f64>()) {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        }
    };
    let value = gheat::expectation_of(payoff, &params.inner, &spec);
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    value.map_err(to_py)
}

fn series_from(values: Vec<f64>, dates: Option<Vec<String>>) -> PyResult<ReturnSeries> {
    match dates {
        None => ReturnSeries::from_values(values).map_err(to_py),
        Some(raw) => {
            let dates = raw
                .iter()
                .map(|d| {
                    NaiveDate::parse_from_str(d, "%Y-%m-%d")
                        .map_err(|e| GvarError::new_err(format!("bad date `{d}`: {e}")))
                })
                .collect::<PyResult<Vec<_>>>()?;
            ReturnSeries::new(dates, values).map_err(to_py)
        }
    }
}

/// `(r_hat, var_lo_hat, var_hi_hat)` at zero-based position `t`.
#[pyfunction]
fn local_estimates(values: Vec<f64>, t: usize, k: usize, l: usize) -> PyResult<(f64, f64, f64)> {
    let series = series_from(values, None)?;
    let cfg = WindowConfig::new(k, l, 3).map_err(to_py)?;
    let est = windows::local_estimates(&series, t, &cfg).map_err(to_py)?;
    Ok((est.r_hat, est.var_lo_hat, est.var_hi_hat))
}

/// `(intercept, slope)` of the least-squares AR(1) fit.
#[pyfunction]
fn fit_ar1(values: Vec<f64>) -> PyResult<(f64, f64)> {
    let fit = gvar_core::fit_ar1(&values).map_err(to_py)?;
    Ok((fit.intercept, fit.slope))
}

/// Violation counts and coverage/independence tests as a dict.
#[pyfunction]
#[pyo3(name = "backtest")]
fn backtest_py<'py>(
    py: Python<'py>,
    returns: Vec<f64>,
    var_forecasts: Vec<f64>,
    alpha: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = backtest::build_report(&returns, &var_forecasts, alpha).map_err(to_py)?;
    let out = PyDict::new(py);
    let c = report.counts;
    out.set_item("counts", (c.m00, c.m01, c.m10, c.m11))?;
    out.set_item("alpha_hat", report.alpha_hat.get())?;
    out.set_item("pi01", report.pi01.map(|p| p.get()))?;
    out.set_item("pi11", report.pi11.map(|p| p.get()))?;
    out.set_item("t1", report.t1)?;
    out.set_item("t2", report.t2)?;
    out.set_item("lr_uc", report.lr_uc.get())?;
    out.set_item("lr_ind", report.lr_ind.get())?;
    out.set_item("mean_var", report.mean_var)?;
    out.set_item("horizon", report.horizon)?;
    Ok(out)
}

/// `(date, realized, r_tilde, sigma_lo_tilde, sigma_hi_tilde, g_var)`.
type ForecastRow = (String, f64, f64, f64, f64, f64);

/// Rolling G-VaR forecasts. Returns a list of
/// `(date, realized, r_tilde, sigma_lo_tilde, sigma_hi_tilde, g_var)` tuples.
#[pyfunction]
#[pyo3(signature = (values, dates = None, alpha = 0.05, k = 5, l = 10, n = 100, ar_mode = "daily", last = None))]
#[allow(clippy::too_many_arguments)]
fn run_gvar(
    values: Vec<f64>,
    dates: Option<Vec<String>>,
    alpha: f64,
    k: usize,
    l: usize,
    n: usize,
    ar_mode: &str,
    last: Option<usize>,
) -> PyResult<Vec<ForecastRow>> {
    let series = series_from(values, dates)?;
    let cfg = EngineConfig {
        alpha,
        window: WindowConfig::new(k, l, n).map_err(to_py)?,
        ar_mode: ar_mode.parse::<ArMode>().map_err(to_py)?,
        last,
        ..EngineConfig::default()
    };
    let records = pipeline::run_gvar(&series, &cfg).map_err(to_py)?;
    Ok(records
        .iter()
        .map(|r| {
            (
                r.date.to_string(),
                r.realized_return,
                r.forecast.r_tilde,
                r.forecast.sigma_lo(),
                r.forecast.sigma_hi(),
                r.g_var,
            )
        })
        .collect())
}

/// Regime-switching returns from a seeded generator.
#[pyfunction]
#[pyo3(signature = (n, sigma_lo = 0.5, sigma_hi = 2.0, mu = 0.0, switch_prob = 0.02, seed = 0))]
fn simulate(
    n: usize,
    sigma_lo: f64,
    sigma_hi: f64,
    mu: f64,
    switch_prob: f64,
    seed: u64,
) -> PyResult<Vec<f64>> {
    let spec = RegimeSwitching::new(n, sigma_lo, sigma_hi, mu, switch_prob);
    let series = pipeline::simulate_regime_switching(&spec, seed).map_err(to_py)?;
    Ok(series.values().to_vec())
}

#[pymodule]
pub fn gvar(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GvarError", m.py().get_type::<GvarError>())?;
    m.add_class::<PyGNormalParams>()?;
    m.add_function(wrap_pyfunction!(g_function, m)?)?;
    m.add_function(wrap_pyfunction!(g_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(g_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(g_var, m)?)?;
    m.add_function(wrap_pyfunction!(numeric_g_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(expectation_of, m)?)?;
    m.add_function(wrap_pyfunction!(local_estimates, m)?)?;
    m.add_function(wrap_pyfunction!(fit_ar1, m)?)?;
    m.add_function(wrap_pyfunction!(backtest_py, m)?)?;
    m.add_function(wrap_pyfunction!(run_gvar, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
