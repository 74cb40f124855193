//! Small-window estimation of the per-date G-normal parameters.
//!
//! For a date index `t`, window `j` covers the `L` observations ending at
//! `t − j`. The return estimate is the mean of window 0; the variance interval
//! is the min and max of the unbiased sample variances over windows
//! `j = 0, …, K − 1`. All indices are zero-based positions in the series.

use chrono::{Duration, NaiveDate};

use crate::error::{GvarError, Result};

/// Date-indexed return series `Z_t` (100 × daily log-return).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if dates.len() != values.len() {
            return Err(GvarError::Contract(format!(
                "{} dates but {} values",
                dates.len(),
                values.len()
            )));
        }
        if let Some(w) = dates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(GvarError::Contract(format!(
                "dates must be strictly increasing ({} then {})",
                dates[w],
                dates[w + 1]
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(GvarError::Contract(format!(
                "non-finite return at position {i}"
            )));
        }
        Ok(ReturnSeries { dates, values })
    }

    /// Series with consecutive calendar dates starting at 2000-01-01.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let dates = (0..values.len())
            .map(|i| start + Duration::days(i as i64))
            .collect();
        Self::new(dates, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Contiguous sub-series over positions `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> ReturnSeries {
        ReturnSeries {
            dates: self.dates[range.clone()].to_vec(),
            values: self.values[range].to_vec(),
        }
    }

    /// Position of `date`, if present.
    pub fn position(&self, date: NaiveDate) -> Option<usize> {
        self.dates.binary_search(&date).ok()
    }
}

/// Window geometry: `K` shifted windows of width `L`, and `N` calibration dates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    /// K
    pub windows: usize,
    /// L
    pub width: usize,
    /// N
    pub history: usize,
}

impl WindowConfig {
    /// Arguments in the conventional `(K, L, N)` order.
    pub fn new(windows: usize, width: usize, history: usize) -> Result<Self> {
        let cfg = WindowConfig {
            windows,
            width,
            history,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 {
            return Err(GvarError::Config(format!(
                "window width L must be >= 2, got {}",
                self.width
            )));
        }
        if self.windows < 1 {
            return Err(GvarError::Config("window count K must be >= 1".into()));
        }
        if self.history < 3 {
            return Err(GvarError::Config(format!(
                "calibration length N must be >= 3, got {}",
                self.history
            )));
        }
        Ok(())
    }

    /// Observations needed up to and including a date to estimate at it: `L + K − 1`.
    pub fn estimation_span(&self) -> usize {
        self.width + self.windows - 1
    }
}

/// Per-date estimates `(r̂_t, σ̲̂²_t, σ̄̂²_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalEstimates {
    pub date: NaiveDate,
    pub r_hat: f64,
    pub var_lo_hat: f64,
    pub var_hi_hat: f64,
}

fn window(values: &[f64], t: usize, j: usize, width: usize) -> Result<&[f64]> {
    let needed = width + j;
    if t >= values.len() {
        return Err(GvarError::Range(format!(
            "index {t} beyond series of length {}",
            values.len()
        )));
    }
    if t + 1 < needed {
        return Err(GvarError::InsufficientHistory {
            required: needed,
            available: t + 1,
        });
    }
    let end = t + 1 - j;
    Ok(&values[end - width..end])
}

/// Both moments are accumulated relative to the first value, so constant
/// windows give exactly that constant and exactly zero variance.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    let x0 = xs[0];
    x0 + xs.iter().map(|x| x - x0).sum::<f64>() / xs.len() as f64
}

pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    let x0 = xs[0];
    let m = xs.iter().map(|x| x - x0).sum::<f64>() / xs.len() as f64;
    xs.iter().map(|x| (x - x0 - m) * (x - x0 - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Mean of the `width` values ending at position `t − j`.
pub fn window_mean(values: &[f64], t: usize, j: usize, width: usize) -> Result<f64> {
    if width == 0 {
        return Err(GvarError::Config("window width must be positive".into()));
    }
    Ok(mean(window(values, t, j, width)?))
}

/// Unbiased sample variance (denominator `width − 1`) of the same window.
pub fn window_variance(values: &[f64], t: usize, j: usize, width: usize) -> Result<f64> {
    if width < 2 {
        return Err(GvarError::Config("sample variance needs width >= 2".into()));
    }
    Ok(sample_variance(window(values, t, j, width)?))
}

/// Estimates at position `t`.
pub fn local_estimates(
    series: &ReturnSeries,
    t: usize,
    cfg: &WindowConfig,
) -> Result<LocalEstimates> {
    cfg.validate()?;
    let values = series.values();
    let last = cfg.windows - 1;
    // Fail on the deepest window first so the error reports the full requirement.
    window(values, t, last, cfg.width)?;
    let r_hat = window_mean(values, t, 0, cfg.width)?;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..cfg.windows {
        let v = window_variance(values, t, j, cfg.width)?;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(LocalEstimates {
        date: series.dates()[t],
        r_hat,
        var_lo_hat: lo,
        var_hi_hat: hi,
    })
}

/// Estimates at every position in `t_start..=t_end`.
///
/// Window `j` at `t` is window 0 at `t − j`, so each window variance is
/// computed once and the min/max run over the trailing `K` of them.
pub fn rolling_estimates(
    series: &ReturnSeries,
    t_start: usize,
    t_end: usize,
    cfg: &WindowConfig,
) -> Result<Vec<LocalEstimates>> {
    cfg.validate()?;
    if t_start > t_end {
        return Err(GvarError::Range(format!("empty range {t_start}..={t_end}")));
    }
    let values = series.values();
    if t_end >= values.len() {
        return Err(GvarError::Range(format!(
            "index {t_end} beyond series of length {}",
            values.len()
        )));
    }
    window(values, t_start, cfg.windows - 1, cfg.width)?;

    let first_window = t_start + 1 - cfg.windows;
    let variances: Vec<f64> = (first_window..=t_end)
        .map(|s| window_variance(values, s, 0, cfg.width))
        .collect::<Result<_>>()?;

    (t_start..=t_end)
        .map(|t| {
            let k = t - first_window;
            let trailing = &variances[k + 1 - cfg.windows..=k];
            let lo = trailing.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = trailing.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Ok(LocalEstimates {
                date: series.dates()[t],
                r_hat: window_mean(values, t, 0, cfg.width)?,
                var_lo_hat: lo,
                var_hi_hat: hi,
            })
        })
        .collect()
}

/// φ-max–mean estimator: min and max of the block means of `φ(sample)` over
/// consecutive disjoint blocks of `block` samples. A trailing partial block is dropped.
pub fn phi_max_mean<F>(samples: &[f64], phi: F, block: usize) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if block == 0 {
        return Err(GvarError::Config("block size must be positive".into()));
    }
    let blocks = samples.len() / block;
    if blocks < 2 {
        return Err(GvarError::Range(format!(
            "need at least two complete blocks of {block}, have {} samples",
            samples.len()
        )));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for chunk in samples.chunks_exact(block) {
        let z = chunk.iter().map(|&x| phi(x)).sum::<f64>() / block as f64;
        lo = lo.min(z);
        hi = hi.max(z);
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIX: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];

    fn series(values: &[f64]) -> ReturnSeries {
        ReturnSeries::from_values(values.to_vec()).unwrap()
    }

    #[test]
    fn series_rejects_unordered_dates() {
        let d = NaiveDate::from_ymd_opt(2020, 1, 2).unwrap();
        assert!(ReturnSeries::new(vec![d, d], vec![0.0, 1.0]).is_err());
        assert!(ReturnSeries::new(vec![d], vec![0.0, 1.0]).is_err());
        assert!(ReturnSeries::new(vec![d], vec![f64::NAN]).is_err());
    }

    #[test]
    fn window_mean_examples() {
        assert_eq!(window_mean(&[2.5; 9], 8, 3, 4).unwrap(), 2.5);
        assert_eq!(window_mean(&SIX, 5, 0, 3).unwrap(), 5.0);
        assert_eq!(window_mean(&SIX, 5, 1, 3).unwrap(), 4.0);
    }

    #[test]
    fn window_mean_reports_shortfall() {
        match window_mean(&SIX, 2, 1, 3) {
            Err(GvarError::InsufficientHistory {
                required,
                available,
            }) => {
                assert_eq!((required, available), (4, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn window_variance_examples() {
        assert_eq!(window_variance(&[1.5; 5], 4, 0, 5).unwrap(), 0.0);
        assert_eq!(window_variance(&SIX, 5, 0, 3).unwrap(), 1.0);
        assert_eq!(window_variance(&[0.0, 0.0, 3.0], 2, 0, 3).unwrap(), 3.0);
        assert!(window_variance(&SIX, 5, 0, 1).is_err());
    }

    #[test]
    fn local_estimates_examples() {
        let s = series(&SIX);
        let cfg = WindowConfig::new(2, 3, 3).unwrap();
        let e = local_estimates(&s, 5, &cfg).unwrap();
        assert_eq!((e.r_hat, e.var_lo_hat, e.var_hi_hat), (5.0, 1.0, 1.0));

        let s = series(&[0.3, -1.2, 2.2, 0.7, -0.4, 1.9, 0.1]);
        let cfg = WindowConfig::new(1, 4, 3).unwrap();
        let e = local_estimates(&s, 6, &cfg).unwrap();
        let v = window_variance(s.values(), 6, 0, 4).unwrap();
        assert_eq!((e.var_lo_hat, e.var_hi_hat), (v, v));
    }

    #[test]
    fn local_estimates_needs_full_span() {
        let s = series(&SIX);
        let cfg = WindowConfig::new(3, 3, 3).unwrap();
        assert!(local_estimates(&s, 4, &cfg).is_ok());
        match local_estimates(&s, 3, &cfg) {
            Err(GvarError::InsufficientHistory { required, .. }) => assert_eq!(required, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rolling_matches_pointwise() {
        let values: Vec<f64> = (0..60)
            .map(|i| ((i * 37 % 17) as f64 - 8.0) * 0.3)
            .collect();
        let s = series(&values);
        let cfg = WindowConfig::new(4, 6, 3).unwrap();
        let rolled = rolling_estimates(&s, 9, 59, &cfg).unwrap();
        assert_eq!(rolled.len(), 51);
        for (k, e) in rolled.iter().enumerate() {
            assert_eq!(*e, local_estimates(&s, 9 + k, &cfg).unwrap());
        }
        let single = rolling_estimates(&s, 20, 20, &cfg).unwrap();
        assert_eq!(single, vec![local_estimates(&s, 20, &cfg).unwrap()]);
    }

    #[test]
    fn rolling_constant_series() {
        let s = series(&[0.75; 30]);
        let cfg = WindowConfig::new(5, 5, 3).unwrap();
        for e in rolling_estimates(&s, 10, 29, &cfg).unwrap() {
            assert_eq!((e.r_hat, e.var_lo_hat, e.var_hi_hat), (0.75, 0.0, 0.0));
        }
    }

    #[test]
    fn phi_max_mean_examples() {
        assert_eq!(phi_max_mean(&[0.25; 9], |z| z, 3).unwrap(), (0.25, 0.25));
        assert_eq!(
            phi_max_mean(&[1.0, 2.0, 3.0, 4.0], |z| z, 2).unwrap(),
            (1.5, 3.5)
        );
        assert_eq!(
            phi_max_mean(&[1.0, -1.0, 2.0, -2.0], |z| z * z, 2).unwrap(),
            (1.0, 4.0)
        );
        assert_eq!(
            phi_max_mean(&[1.0, 2.0, 3.0, 4.0, 100.0], |z| z, 2).unwrap(),
            (1.5, 3.5)
        );
        assert!(phi_max_mean(&[1.0, 2.0, 3.0], |z| z, 2).is_err());
        assert!(phi_max_mean(&[1.0, 2.0], |z| z, 0).is_err());
    }

    #[test]
    fn config_bounds() {
        assert!(WindowConfig::new(1, 1, 3).is_err());
        assert!(WindowConfig::new(0, 5, 3).is_err());
        assert!(WindowConfig::new(5, 10, 2).is_err());
        assert_eq!(WindowConfig::new(5, 10, 100).unwrap().estimation_span(), 14);
    }
}
