//! Synthetic return series with a two-state volatility chain.

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GvarError, Result};
use crate::windows::ReturnSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Low,
    High,
}

/// Parameters of a regime-switching return generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeSwitching {
    pub n: usize,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub mu: f64,
    /// Probability of leaving the current regime after each step.
    pub switch_prob: f64,
    pub start: Regime,
}

impl RegimeSwitching {
    pub fn new(n: usize, sigma_lo: f64, sigma_hi: f64, mu: f64, switch_prob: f64) -> Self {
        RegimeSwitching {
            n,
            sigma_lo,
            sigma_hi,
            mu,
            switch_prob,
            start: Regime::High,
        }
    }

    pub fn starting_in(self, start: Regime) -> Self {
        RegimeSwitching { start, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma_lo > 0.0 && self.sigma_lo <= self.sigma_hi && self.sigma_hi.is_finite()) {
            return Err(GvarError::Domain(format!(
                "need 0 < sigma_lo <= sigma_hi, got {} and {}",
                self.sigma_lo, self.sigma_hi
            )));
        }
        if !(0.0..=1.0).contains(&self.switch_prob) {
            return Err(GvarError::Domain(format!(
                "switch probability {} outside [0, 1]",
                self.switch_prob
            )));
        }
        if !self.mu.is_finite() {
            return Err(GvarError::Domain("mu must be finite".into()));
        }
        Ok(())
    }
}

/// Consecutive weekdays starting at 2000-01-03.
pub fn business_days(n: usize) -> Vec<NaiveDate> {
    let mut day = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        if !matches!(day.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(day);
        }
        day += Duration::days(1);
    }
    out
}

/// `Z_t = μ + σ_{state_t}·ξ_t` with standard Gaussian `ξ_t` from a seeded ChaCha8 stream.
pub fn simulate_regime_switching(spec: &RegimeSwitching, seed: u64) -> Result<ReturnSeries> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = spec.start;
    let mut values = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let sigma = match state {
            Regime::Low => spec.sigma_lo,
            Regime::High => spec.sigma_hi,
        };
        let xi: f64 = rng.sample(StandardNormal);
        values.push(spec.mu + sigma * xi);
        if rng.random::<f64>() < spec.switch_prob {
            state = match state {
                Regime::Low => Regime::High,
                Regime::High => Regime::Low,
            };
        }
    }
    ReturnSeries::new(business_days(spec.n), values)
}
