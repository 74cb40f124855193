//! VaR backtesting: violation transition counts, the unconditional coverage
//! likelihood-ratio test and the Christoffersen independence test.
//!
//! A violation on a date means the realised return fell strictly below the
//! forecast quantile, `Z < −VaR`. Consecutive dates form pairs; `m_ab` counts
//! pairs whose first date has state `a` and second date state `b`
//! (1 = violation). Both statistics are referred to χ²(1).

use crate::error::{GvarError, Result};
use crate::numerics::{chi2_df1_sf, Probability};

/// Transition counts of the violation indicator sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ViolationCounts {
    pub m00: u64,
    pub m01: u64,
    pub m10: u64,
    pub m11: u64,
}

impl ViolationCounts {
    pub fn new(m00: u64, m01: u64, m10: u64, m11: u64) -> Self {
        ViolationCounts { m00, m01, m10, m11 }
    }

    /// Pairs starting in the non-violation state.
    pub fn m0(&self) -> u64 {
        self.m00 + self.m01
    }

    /// Pairs starting in the violation state.
    pub fn m1(&self) -> u64 {
        self.m10 + self.m11
    }

    pub fn total(&self) -> u64 {
        self.m0() + self.m1()
    }

    /// `m1 / (m0 + m1)`; `None` for an empty sample.
    pub fn alpha_hat(&self) -> Option<f64> {
        ratio(self.m1(), self.total())
    }

    /// `m01 / (m00 + m01)`; `None` when state 0 never starts a pair.
    pub fn pi01(&self) -> Option<f64> {
        ratio(self.m01, self.m0())
    }

    /// `m11 / (m10 + m11)`; `None` when state 1 never starts a pair.
    pub fn pi11(&self) -> Option<f64> {
        ratio(self.m11, self.m1())
    }

    /// `(m01 + m11) / total`.
    pub fn pi(&self) -> Option<f64> {
        ratio(self.m01 + self.m11, self.total())
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// `count · ln(p)` with `0 · ln(0) = 0`.
fn xlogy(count: u64, p: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * p.ln()
    }
}

/// True when `realized < −var` (ties are not violations).
pub fn is_violation(realized: f64, var: f64) -> bool {
    realized < -var
}

/// Classifies consecutive date pairs of aligned returns and VaR forecasts.
pub fn count_violations(returns: &[f64], var_forecasts: &[f64]) -> Result<ViolationCounts> {
    if returns.len() != var_forecasts.len() {
        return Err(GvarError::Contract(format!(
            "{} returns but {} VaR forecasts",
            returns.len(),
            var_forecasts.len()
        )));
    }
    if returns.len() < 2 {
        return Err(GvarError::Contract(
            "need at least two dates to form a violation pair".into(),
        ));
    }
    let flags: Vec<bool> = returns
        .iter()
        .zip(var_forecasts)
        .map(|(&z, &v)| is_violation(z, v))
        .collect();
    let mut counts = ViolationCounts::default();
    for pair in flags.windows(2) {
        match (pair[0], pair[1]) {
            (false, false) => counts.m00 += 1,
            (false, true) => counts.m01 += 1,
            (true, false) => counts.m10 += 1,
            (true, true) => counts.m11 += 1,
        }
    }
    Ok(counts)
}

/// Unconditional coverage statistic `T1` and its χ²(1) p-value.
pub fn lr_uc(counts: &ViolationCounts, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GvarError::domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let alpha_hat = counts
        .alpha_hat()
        .ok_or_else(|| GvarError::Contract("coverage test on an empty sample".into()))?;
    let t1 = 2.0
        * (xlogy(counts.m1(), alpha_hat / alpha)
            + xlogy(counts.m0(), (1.0 - alpha_hat) / (1.0 - alpha)));
    let t1 = t1.max(0.0);
    Ok((t1, chi2_df1_sf(t1)?))
}

/// Christoffersen independence statistic `T2` and its χ²(1) p-value.
///
/// Factors with a zero exponent contribute 1; when a state never starts a
/// pair its transition probability is undefined and its factors are dropped.
pub fn lr_ind(counts: &ViolationCounts) -> Result<(f64, f64)> {
    let pi = counts
        .pi()
        .ok_or_else(|| GvarError::Contract("independence test on an empty sample".into()))?;
    let mut unrestricted = 0.0;
    if let Some(p01) = counts.pi01() {
        unrestricted += xlogy(counts.m00, 1.0 - p01) + xlogy(counts.m01, p01);
    }
    if let Some(p11) = counts.pi11() {
        unrestricted += xlogy(counts.m10, 1.0 - p11) + xlogy(counts.m11, p11);
    }
    let restricted = xlogy(counts.m00 + counts.m10, 1.0 - pi) + xlogy(counts.m01 + counts.m11, pi);
    let t2 = (2.0 * (unrestricted - restricted)).max(0.0);
    Ok((t2, chi2_df1_sf(t2)?))
}

/// Summary of a VaR forecast sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub counts: ViolationCounts,
    pub alpha: Probability,
    pub alpha_hat: Probability,
    /// `None` when the non-violation state never starts a pair.
    pub pi01: Option<Probability>,
    /// `None` when the violation state never starts a pair.
    pub pi11: Option<Probability>,
    pub pi: Probability,
    pub t1: f64,
    pub t2: f64,
    pub lr_uc: Probability,
    pub lr_ind: Probability,
    /// Mean VaR forecast, in the units of the returns.
    pub mean_var: f64,
    /// Number of forecast dates (`h − t₀`).
    pub horizon: usize,
}

pub fn build_report(returns: &[f64], var_forecasts: &[f64], alpha: f64) -> Result<BacktestReport> {
    let counts = count_violations(returns, var_forecasts)?;
    let (t1, p_uc) = lr_uc(&counts, alpha)?;
    let (t2, p_ind) = lr_ind(&counts)?;
    let prob = |v: f64| Probability::saturating(v);
    Ok(BacktestReport {
        counts,
        alpha: Probability::new(alpha)?,
        alpha_hat: prob(counts.alpha_hat().unwrap_or(0.0)),
        pi01: counts.pi01().map(prob),
        pi11: counts.pi11().map(prob),
        pi: prob(counts.pi().unwrap_or(0.0)),
        t1,
        t2,
        lr_uc: prob(p_uc),
        lr_ind: prob(p_ind),
        mean_var: var_forecasts.iter().sum::<f64>() / var_forecasts.len() as f64,
        horizon: returns.len(),
    })
}
