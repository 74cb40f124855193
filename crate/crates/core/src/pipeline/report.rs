//! Text output: the per-date forecast table, the backtest summary row, the
//! grid score table and the PDE comparison dump. All tables are
//! comma-separated with a header row; floats use 6 significant digits.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::arcal::Forecast;
use crate::backtest::BacktestReport;
use crate::error::{GvarError, Result};
use crate::gheat::CdfComparison;
use crate::pipeline::engine::{ForecastRecord, GridSearch};
use crate::windows::ReturnSeries;

pub const FORECAST_HEADER: &str = "date,z,r_tilde,sigma_lo_tilde,sigma_hi_tilde,g_var,violation";
pub const SUMMARY_HEADER: &str = "horizon,alpha_hat,lr_uc,lr_ind,mean_var";
pub const GRID_HEADER: &str = "k,l,horizon,alpha_hat,lr_uc,lr_ind,mean_var,status";
pub const PDE_HEADER: &str = "x,closed_form,numeric,difference";
pub const RETURNS_HEADER: &str = "date,z";

/// Formats like C's `%.6g`.
pub fn fmt_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_returns<W: Write>(mut w: W, series: &ReturnSeries) -> Result<()> {
    writeln!(w, "{RETURNS_HEADER}")?;
    for (d, z) in series.dates().iter().zip(series.values()) {
        writeln!(w, "{d},{}", fmt_sig6(*z))?;
    }
    Ok(())
}

pub fn write_forecast_table<W: Write>(mut w: W, records: &[ForecastRecord]) -> Result<()> {
    writeln!(w, "{FORECAST_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.date,
            fmt_sig6(r.realized_return),
            fmt_sig6(r.forecast.r_tilde),
            fmt_sig6(r.forecast.sigma_lo()),
            fmt_sig6(r.forecast.sigma_hi()),
            fmt_sig6(r.g_var),
            u8::from(r.violation())
        )?;
    }
    Ok(())
}

/// Reads a table written by [`write_forecast_table`]. The forecast as-of
/// date is not stored, so each record's forecast carries its own date.
pub fn parse_forecast_table<R: Read>(reader: R) -> Result<Vec<ForecastRecord>> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = csv.headers().map_err(|e| ingest(1, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>().join(",") != FORECAST_HEADER {
        return Err(ingest(1, format!("expected header `{FORECAST_HEADER}`")));
    }
    let mut out = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| ingest(0, e.to_string()))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let num = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|_| ingest(line, format!("bad number `{}`", &record[i])))
        };
        let date = NaiveDate::parse_from_str(&record[0], "%Y-%m-%d")
            .map_err(|e| ingest(line, format!("bad date `{}`: {e}", &record[0])))?;
        let (lo, hi) = (num(3)?, num(4)?);
        out.push(ForecastRecord {
            date,
            forecast: Forecast {
                date,
                r_tilde: num(2)?,
                var_lo_tilde: lo * lo,
                var_hi_tilde: hi * hi,
            },
            g_var: num(5)?,
            realized_return: num(1)?,
        });
    }
    Ok(out)
}

fn ingest(line: usize, message: String) -> GvarError {
    GvarError::Ingestion { line, message }
}

pub fn summary_row(report: &BacktestReport) -> String {
    format!(
        "{},{},{},{},{}",
        report.horizon,
        fmt_sig6(report.alpha_hat.get()),
        fmt_sig6(report.lr_uc.get()),
        fmt_sig6(report.lr_ind.get()),
        fmt_sig6(report.mean_var)
    )
}

pub fn write_summary<W: Write>(mut w: W, report: &BacktestReport) -> Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    writeln!(w, "{}", summary_row(report))?;
    Ok(())
}

pub fn write_grid_table<W: Write>(mut w: W, grid: &GridSearch) -> Result<()> {
    writeln!(w, "{GRID_HEADER}")?;
    for cell in &grid.cells {
        match &cell.outcome {
            Ok(report) => {
                let status = if (cell.windows, cell.width) == grid.best {
                    "best"
                } else {
                    "ok"
                };
                writeln!(
                    w,
                    "{},{},{},{status}",
                    cell.windows,
                    cell.width,
                    summary_row(report)
                )?;
            }
            Err(msg) => {
                let msg = msg.replace([',', '\n'], ";");
                writeln!(w, "{},{},,,,,,error: {msg}", cell.windows, cell.width)?;
            }
        }
    }
    Ok(())
}

pub fn write_pde_check<W: Write>(mut w: W, rows: &[CdfComparison]) -> Result<()> {
    writeln!(w, "{PDE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_sig6(r.x),
            fmt_sig6(r.closed_form),
            fmt_sig6(r.numeric),
            fmt_sig6(r.difference())
        )?;
    }
    Ok(())
}

/// Writes `forecasts.csv` and `summary.csv` into `dir`, returning both paths.
pub fn emit_report(
    records: &[ForecastRecord],
    report: &BacktestReport,
    dir: impl AsRef<Path>,
) -> Result<(PathBuf, PathBuf)> {
    if records.is_empty() {
        return Err(GvarError::Contract("no forecast records to emit".into()));
    }
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let table = dir.join("forecasts.csv");
    let summary = dir.join("summary.csv");
    let mut buf = Vec::new();
    write_forecast_table(&mut buf, records)?;
    std::fs::write(&table, buf)?;
    let mut buf = Vec::new();
    write_summary(&mut buf, report)?;
    std::fs::write(&summary, buf)?;
    Ok((table, summary))
}
