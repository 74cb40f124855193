//! Explicit finite-difference solver for the one-dimensional G-heat equation
//!
//! ```text
//! ∂_t u = G(∂²_xx u),   u(0, x) = φ(x),
//! ```
//!
//! with `G(a) = ½(σ̄² a⁺ − σ̲² a⁻)`. The scheme applies `G` to the central second
//! difference and steps forward in time. With `dt·σ̄²/dx² ≤ 0.9` every update is
//! a convex combination of neighbouring values, so the scheme is monotone and
//! converges to the viscosity solution. `u(1, ·)` gives sublinear
//! expectations `E_G[φ(x + ξ)]` of a centred G-normal `ξ`, which makes the
//! solver an independent check on the closed-form CDF in [`crate::gnormal`].

use crate::error::{GvarError, Result};
use crate::gnormal::{g_cdf, g_unchecked, GNormalParams};

/// Largest admissible `dt·σ̄²/dx²`.
pub const MAX_COURANT: f64 = 0.9;

/// Default half-width of the spatial domain in units of σ̄.
pub const DEFAULT_HALF_WIDTH: f64 = 8.0;

/// Default node count.
pub const DEFAULT_NODES: usize = 1601;

/// Fraction of the domain (centred) on which interpolated values are trusted.
pub const TRUSTED_FRACTION: f64 = 0.8;

/// Spatial domain, resolution and time step of a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub dt: f64,
}

impl GridSpec {
    /// `[−8σ̄, 8σ̄]`, 1601 nodes, `dt = 0.9·dx²/σ̄²`.
    pub fn standard(p: &GNormalParams) -> Self {
        Self::symmetric(p, DEFAULT_HALF_WIDTH, DEFAULT_NODES)
    }

    /// `[−w·σ̄, w·σ̄]` with `nx` nodes and the largest stable time step.
    pub fn symmetric(p: &GNormalParams, half_width_sigmas: f64, nx: usize) -> Self {
        let half = half_width_sigmas * p.sigma_hi();
        let dx = 2.0 * half / (nx.saturating_sub(1).max(1)) as f64;
        GridSpec {
            x_min: -half,
            x_max: half,
            nx,
            dt: MAX_COURANT * dx * dx / p.var_hi(),
        }
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    /// Node `i`, computed so that the centre node of a symmetric odd grid is exactly 0.
    pub fn node(&self, i: usize) -> f64 {
        self.x_min + (self.x_max - self.x_min) * i as f64 / (self.nx - 1) as f64
    }

    /// Interval on which interpolated solution values are trusted.
    pub fn trusted_interior(&self) -> (f64, f64) {
        let margin = 0.5 * (1.0 - TRUSTED_FRACTION) * (self.x_max - self.x_min);
        (self.x_min + margin, self.x_max - margin)
    }

    fn validate(&self, p: &GNormalParams) -> Result<()> {
        if self.nx < 3 {
            return Err(GvarError::Config(format!(
                "need at least 3 nodes, got {}",
                self.nx
            )));
        }
        if !(self.x_min < 0.0 && 0.0 < self.x_max)
            || !self.x_min.is_finite()
            || !self.x_max.is_finite()
        {
            return Err(GvarError::Config(format!(
                "domain [{}, {}] must straddle 0",
                self.x_min, self.x_max
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(GvarError::Config(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        let dx = self.dx();
        let courant = self.dt * p.var_hi() / (dx * dx);
        // Allow for the rounding in dt = 0.9·dx²/σ̄².
        if courant > MAX_COURANT * (1.0 + 1e-12) {
            return Err(GvarError::Config(format!(
                "unstable grid: dt*sigma_hi^2/dx^2 = {courant:.6} exceeds {MAX_COURANT}"
            )));
        }
        Ok(())
    }
}

/// Solution of a G-heat solve at its final time.
#[derive(Debug, Clone)]
pub struct PDEGrid {
    spec: GridSpec,
    /// Time step actually used (≤ `spec.dt`, chosen to land on `t_final`).
    dt: f64,
    steps: usize,
    t_final: f64,
    u: Vec<f64>,
}

impl PDEGrid {
    pub fn x_min(&self) -> f64 {
        self.spec.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.spec.x_max
    }

    pub fn nx(&self) -> usize {
        self.spec.nx
    }

    pub fn dx(&self) -> f64 {
        self.spec.dx()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.spec.nx).map(move |i| self.spec.node(i))
    }

    /// Linear interpolation of the solution; `None` outside the domain.
    pub fn interpolate(&self, x: f64) -> Option<f64> {
        if !(x >= self.spec.x_min && x <= self.spec.x_max) {
            return None;
        }
        let pos = (x - self.spec.x_min) / self.dx();
        let i = (pos.floor() as usize).min(self.spec.nx - 2);
        let w = pos - i as f64;
        Some((1.0 - w) * self.u[i] + w * self.u[i + 1])
    }
}

/// Indicator of `[0, ∞)` with the value ½ at the jump.
pub fn step_indicator(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x == 0.0 {
        0.5
    } else {
        0.0
    }
}

/// Solves the G-heat equation up to `t_final` and returns `u(t_final, ·)`.
///
/// Only the volatility interval of `p` enters the equation; its mean is ignored.
/// Boundary nodes stay pinned at their initial values.
pub fn solve_gheat<F>(p: &GNormalParams, phi0: F, t_final: f64, spec: &GridSpec) -> Result<PDEGrid>
where
    F: Fn(f64) -> f64,
{
    solve_gheat_observed(p, phi0, t_final, spec, |_, _| {})
}

/// Like [`solve_gheat`], calling `observer(step, u)` after initialisation
/// (step 0) and after every time step.
pub fn solve_gheat_observed<F, O>(
    p: &GNormalParams,
    phi0: F,
    t_final: f64,
    spec: &GridSpec,
    mut observer: O,
) -> Result<PDEGrid>
where
    F: Fn(f64) -> f64,
    O: FnMut(usize, &[f64]),
{
    spec.validate(p)?;
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(GvarError::Config(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    let steps = (t_final / spec.dt).ceil().max(1.0) as usize;
    let dt = t_final / steps as f64;
    let dx = spec.dx();
    let nx = spec.nx;

    let mut u: Vec<f64> = (0..nx).map(|i| phi0(spec.node(i))).collect();
    if u.iter().any(|v| !v.is_finite()) {
        return Err(GvarError::domain(
            "initial condition must be finite on the grid",
        ));
    }
    let mut next = u.clone();
    let scale = dt / (dx * dx);
    let (var_lo, var_hi) = (p.var_lo(), p.var_hi());
    observer(0, &u);

    for step in 1..=steps {
        for i in 1..nx - 1 {
            let d2 = u[i + 1] - 2.0 * u[i] + u[i - 1];
            next[i] = u[i] + scale * g_unchecked(d2, var_lo, var_hi);
        }
        std::mem::swap(&mut u, &mut next);
        observer(step, &u);
    }

    Ok(PDEGrid {
        spec: *spec,
        dt,
        steps,
        t_final,
        u,
    })
}

/// Numerical upper CDF of a G-normal law, obtained from one indicator solve.
#[derive(Debug, Clone)]
pub struct NumericCdf {
    params: GNormalParams,
    grid: PDEGrid,
}

impl NumericCdf {
    pub fn solve(p: &GNormalParams, spec: &GridSpec) -> Result<Self> {
        let grid = solve_gheat(p, step_indicator, 1.0, spec)?;
        Ok(NumericCdf { params: *p, grid })
    }

    pub fn grid(&self) -> &PDEGrid {
        &self.grid
    }

    /// `E_G[1{ξ ≤ x}]`. With ξ centred, `−ξ` has the same G-distribution, so
    /// this equals `E_G[1{x − μ + ξ ≥ 0}] = u(1, x − μ)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        let z = x - self.params.mu();
        let (lo, hi) = self.grid.spec().trusted_interior();
        if !(z >= lo && z <= hi) {
            return Err(GvarError::Range(format!(
                "x - mu = {z} outside the trusted interior [{lo}, {hi}]"
            )));
        }
        let v = self
            .grid
            .interpolate(z)
            .expect("interior point lies in the domain");
        Ok(v.clamp(0.0, 1.0))
    }
}

/// One-off numerical CDF evaluation. Prefer [`NumericCdf`] for many points.
pub fn numeric_g_cdf(x: f64, p: &GNormalParams, spec: &GridSpec) -> Result<f64> {
    NumericCdf::solve(p, spec)?.cdf(x)
}

/// `E_G[φ(ξ)]` for ξ ~ N(μ, [σ̲², σ̄²]), evaluated as `u^ψ(1, 0)` with `ψ(y) = φ(μ + y)`.
pub fn expectation_of<F>(phi: F, p: &GNormalParams, spec: &GridSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mu = p.mu();
    let grid = solve_gheat(p, |y| phi(mu + y), 1.0, spec)?;
    grid.interpolate(0.0)
        .ok_or_else(|| GvarError::Range("origin outside the spatial domain".into()))
}

/// One row of a closed-form vs finite-difference comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdfComparison {
    pub x: f64,
    pub closed_form: f64,
    pub numeric: f64,
}

impl CdfComparison {
    pub fn difference(&self) -> f64 {
        self.numeric - self.closed_form
    }
}

/// Compares [`g_cdf`] with the numerical CDF at every grid node in the trusted interior.
pub fn compare_with_closed_form(p: &GNormalParams, spec: &GridSpec) -> Result<Vec<CdfComparison>> {
    let numeric = NumericCdf::solve(p, spec)?;
    let (lo, hi) = spec.trusted_interior();
    let grid = numeric.grid();
    grid.nodes()
        .zip(grid.u())
        .filter(|(z, _)| *z >= lo && *z <= hi)
        .map(|(z, &u)| {
            let x = p.mu() + z;
            Ok(CdfComparison {
                x,
                closed_form: g_cdf(x, p)?,
                numeric: u,
            })
        })
        .collect()
}
