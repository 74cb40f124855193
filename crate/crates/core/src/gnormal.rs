//! G-normal distribution N(μ, [σ̲², σ̄²]): the generator function, the
//! worst-case (upper) CDF and its inverse, and G-VaR.
//!
//! The upper CDF `F(x) = E_G[1{ξ ≤ x}]` is the value at time 1 of the G-heat
//! equation started from an indicator. It is convex left of μ, where the
//! maximal volatility governs, and concave right of μ, where the minimal
//! volatility governs:
//!
//! ```text
//! x ≤ μ:  F(x) = 2σ̄/(σ̄+σ̲) · Φ((x−μ)/σ̄)
//! x > μ:  F(x) = 1 − 2σ̲/(σ̄+σ̲) · Φ(−(x−μ)/σ̲)
//! ```
//!
//! Both branches meet at `F(μ) = σ̄/(σ̄+σ̲)` with matching slope. Splitting at
//! zero instead of μ, or weighting the upper branch with σ̄, leaves a jump at
//! the branch point whenever σ̲ ≠ σ̄; the finite-difference solver in
//! [`crate::gheat`] confirms the continuous form above.

use crate::error::{GvarError, Result};
use crate::numerics::{std_normal_cdf, std_normal_quantile, std_normal_sf};

/// Parameters (μ, σ̲, σ̄) of a G-normal distribution. Volatilities, not variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GNormalParams {
    mu: f64,
    sigma_lo: f64,
    sigma_hi: f64,
}

impl GNormalParams {
    pub fn new(mu: f64, sigma_lo: f64, sigma_hi: f64) -> Result<Self> {
        if !(mu.is_finite() && sigma_lo.is_finite() && sigma_hi.is_finite()) {
            return Err(GvarError::domain("G-normal parameters must be finite"));
        }
        if sigma_hi <= 0.0 {
            return Err(GvarError::domain(format!(
                "maximal volatility must be positive, got {sigma_hi}"
            )));
        }
        if sigma_lo < 0.0 || sigma_lo > sigma_hi {
            return Err(GvarError::domain(format!(
                "need 0 <= sigma_lo <= sigma_hi, got sigma_lo={sigma_lo}, sigma_hi={sigma_hi}"
            )));
        }
        Ok(GNormalParams {
            mu,
            sigma_lo,
            sigma_hi,
        })
    }

    /// Builds parameters from a mean and a variance interval.
    pub fn from_variances(mu: f64, var_lo: f64, var_hi: f64) -> Result<Self> {
        if var_lo < 0.0 || var_hi < 0.0 {
            return Err(GvarError::domain("variances must be nonnegative"));
        }
        Self::new(mu, var_lo.sqrt(), var_hi.sqrt())
    }

    /// Classical normal N(μ, σ²).
    pub fn classical(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(mu, sigma, sigma)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma_lo(&self) -> f64 {
        self.sigma_lo
    }

    pub fn sigma_hi(&self) -> f64 {
        self.sigma_hi
    }

    pub fn var_lo(&self) -> f64 {
        self.sigma_lo * self.sigma_lo
    }

    pub fn var_hi(&self) -> f64 {
        self.sigma_hi * self.sigma_hi
    }

    /// Same volatility interval, mean set to `mu`.
    pub fn with_mu(&self, mu: f64) -> Self {
        GNormalParams { mu, ..*self }
    }

    /// Upper CDF value at the branch point x = μ.
    pub fn branch_mass(&self) -> f64 {
        self.sigma_hi / (self.sigma_hi + self.sigma_lo)
    }

    fn require_nondegenerate(&self) -> Result<()> {
        if self.sigma_lo > 0.0 {
            Ok(())
        } else {
            Err(GvarError::domain(
                "minimal volatility must be positive for the upper CDF",
            ))
        }
    }
}

/// G(a) = ½(σ̄²·a⁺ − σ̲²·a⁻).
pub fn g_function(a: f64, p: &GNormalParams) -> Result<f64> {
    if !a.is_finite() {
        return Err(GvarError::domain(format!(
            "G-function argument must be finite, got {a}"
        )));
    }
    Ok(g_unchecked(a, p.var_lo(), p.var_hi()))
}

#[inline]
pub(crate) fn g_unchecked(a: f64, var_lo: f64, var_hi: f64) -> f64 {
    if a >= 0.0 {
        0.5 * var_hi * a
    } else {
        0.5 * var_lo * a
    }
}

/// Worst-case CDF `E_G[1{ξ ≤ x}]`.
pub fn g_cdf(x: f64, p: &GNormalParams) -> Result<f64> {
    p.require_nondegenerate()?;
    if !x.is_finite() {
        return Err(GvarError::domain(format!("x must be finite, got {x}")));
    }
    let (lo, hi) = (p.sigma_lo, p.sigma_hi);
    let z = x - p.mu;
    let value = if z <= 0.0 {
        2.0 * hi / (hi + lo) * std_normal_cdf(z / hi)?
    } else {
        1.0 - 2.0 * lo / (hi + lo) * std_normal_sf(z / lo)?
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Inverse of [`g_cdf`].
pub fn g_quantile(alpha: f64, p: &GNormalParams) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GvarError::domain(format!(
            "quantile level must lie in (0, 1), got {alpha}"
        )));
    }
    p.require_nondegenerate()?;
    let (lo, hi) = (p.sigma_lo, p.sigma_hi);
    let split = p.branch_mass();
    if alpha == split {
        return Ok(p.mu);
    }
    let offset = if alpha < split {
        hi * std_normal_quantile(alpha * (hi + lo) / (2.0 * hi))?
    } else {
        -lo * std_normal_quantile((1.0 - alpha) * (hi + lo) / (2.0 * lo))?
    };
    Ok(p.mu + offset)
}

/// G-VaR at level `alpha`: the negated worst-case quantile.
pub fn g_var(alpha: f64, p: &GNormalParams) -> Result<f64> {
    Ok(-g_quantile(alpha, p)?)
}
