//! Price and return file ingestion.
//!
//! Price files are comma-separated with a `date,close` header, ISO-8601 dates
//! in ascending order and strictly positive prices. Returns are
//! `Z_t = 100·ln(P_t / P_{t−1})`, dated at `t`. Files with a `date,z` header
//! (as written by `gvar ingest`) are read as returns directly.

use std::io::Read;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{GvarError, Result};
use crate::windows::ReturnSeries;

/// Dated close prices.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
}

impl PriceSeries {
    /// Log-returns scaled by 100; the first date is dropped.
    pub fn log_returns(&self) -> Result<ReturnSeries> {
        let values = self
            .closes
            .windows(2)
            .map(|w| 100.0 * (w[1] / w[0]).ln())
            .collect();
        ReturnSeries::new(self.dates[1..].to_vec(), values)
    }
}

enum Column {
    Close,
    Returns,
}

fn err(line: usize, message: impl Into<String>) -> GvarError {
    GvarError::Ingestion {
        line,
        message: message.into(),
    }
}

fn read_rows<R: Read>(reader: R) -> Result<(Column, Vec<NaiveDate>, Vec<f64>)> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv.headers().map_err(|e| err(1, e.to_string()))?.clone();
    let find = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let date_col = find("date").ok_or_else(|| err(1, "missing `date` column"))?;
    let (kind, value_col) = match (find("close"), find("z")) {
        (Some(c), _) => (Column::Close, c),
        (None, Some(c)) => (Column::Returns, c),
        (None, None) => return Err(err(1, "missing `close` column")),
    };

    let mut dates: Vec<NaiveDate> = Vec::new();
    let mut values = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            err(line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| record.get(i).ok_or_else(|| err(line, "too few fields"));
        let date_text = field(date_col)?;
        let date = NaiveDate::parse_from_str(date_text, "%Y-%m-%d")
            .map_err(|e| err(line, format!("bad date `{date_text}`: {e}")))?;
        let value_text = field(value_col)?;
        let value: f64 = value_text
            .parse()
            .map_err(|_| err(line, format!("bad number `{value_text}`")))?;
        if !value.is_finite() {
            return Err(err(line, format!("non-finite value `{value_text}`")));
        }
        if matches!(kind, Column::Close) && value <= 0.0 {
            return Err(err(line, format!("price must be positive, got {value}")));
        }
        if let Some(prev) = dates.last() {
            if date <= *prev {
                return Err(err(
                    line,
                    format!("dates must be strictly increasing ({prev} then {date})"),
                ));
            }
        }
        dates.push(date);
        values.push(value);
    }
    Ok((kind, dates, values))
}

/// Parses a `date,close` price table.
pub fn parse_prices<R: Read>(reader: R) -> Result<PriceSeries> {
    let (kind, dates, closes) = read_rows(reader)?;
    if !matches!(kind, Column::Close) {
        return Err(err(1, "expected a `date,close` price table"));
    }
    if closes.len() < 2 {
        return Err(err(
            1,
            format!("need at least 2 price rows, got {}", closes.len()),
        ));
    }
    Ok(PriceSeries { dates, closes })
}

/// Reads a price file and converts it to scaled log-returns.
pub fn load_prices(path: impl AsRef<Path>) -> Result<ReturnSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| err(0, format!("cannot open {}: {e}", path.display())))?;
    parse_prices(file)?.log_returns()
}

/// Parses either a price table or a `date,z` return table.
pub fn parse_series<R: Read>(reader: R) -> Result<ReturnSeries> {
    match read_rows(reader)? {
        (Column::Close, dates, closes) => {
            if closes.len() < 2 {
                return Err(err(
                    1,
                    format!("need at least 2 price rows, got {}", closes.len()),
                ));
            }
            PriceSeries { dates, closes }.log_returns()
        }
        (Column::Returns, dates, values) => ReturnSeries::new(dates, values),
    }
}

/// Reads either a price file or a return file.
pub fn load_series(path: impl AsRef<Path>) -> Result<ReturnSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)
        .map_err(|e| err(0, format!("cannot open {}: {e}", path.display())))?;
    parse_series(file)
}
