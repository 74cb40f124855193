//! Finite-difference G-heat solver: examples, monotonicity, bounds,
//! sublinearity and refinement.

use gvar_core::gheat::{
    compare_with_closed_form, expectation_of, numeric_g_cdf, solve_gheat, solve_gheat_observed,
    step_indicator, GridSpec, NumericCdf,
};
use gvar_core::gnormal::{g_cdf, GNormalParams};
use gvar_core::numerics::std_normal_cdf;
use gvar_core::GvarError;

type Pair = (fn(f64) -> f64, fn(f64) -> f64);

fn params(mu: f64, lo: f64, hi: f64) -> GNormalParams {
    GNormalParams::new(mu, lo, hi).unwrap()
}

fn sup_error(p: &GNormalParams, nx: usize) -> f64 {
    let spec = GridSpec::symmetric(p, 8.0, nx);
    compare_with_closed_form(p, &spec)
        .unwrap()
        .iter()
        .map(|r| r.difference().abs())
        .fold(0.0, f64::max)
}

#[test]
fn classical_heat_kernel() {
    let sigma = 1.3;
    let p = params(0.0, sigma, sigma);
    let spec = GridSpec::standard(&p);
    let grid = solve_gheat(&p, step_indicator, 1.0, &spec).unwrap();
    let (lo, hi) = spec.trusted_interior();
    let mut worst = 0.0_f64;
    for (x, u) in grid.nodes().zip(grid.u()) {
        if x >= lo && x <= hi {
            worst = worst.max((u - std_normal_cdf(x / sigma).unwrap()).abs());
        }
    }
    assert!(worst < 1e-2, "{worst}");
}

#[test]
fn constants_are_preserved_exactly() {
    let p = params(0.0, 0.5, 2.0);
    let spec = GridSpec::symmetric(&p, 8.0, 201);
    let grid = solve_gheat(&p, |_| 0.37, 1.0, &spec).unwrap();
    assert!(grid.u().iter().all(|&v| v == 0.37));
}

#[test]
fn branch_point_value() {
    let p = params(0.0, 1.0, 2.0);
    let grid = solve_gheat(&p, step_indicator, 1.0, &GridSpec::standard(&p)).unwrap();
    assert!((grid.interpolate(0.0).unwrap() - 2.0 / 3.0).abs() < 1e-2);
    assert!((grid.t_final() - 1.0).abs() < 1e-15);
    assert!(grid.dt() * 4.0 / (grid.dx() * grid.dx()) <= 0.9 + 1e-12);
}

#[test]
fn numeric_cdf_examples() {
    let p = params(0.0, 1.0, 1.0);
    let spec = GridSpec::standard(&p);
    assert!((numeric_g_cdf(0.0, &p, &spec).unwrap() - 0.5).abs() < 1e-3);
    assert!((numeric_g_cdf(-2.0, &p, &spec).unwrap() - 0.022_750_131_948_179_2).abs() < 1e-3);

    let p = params(0.7, 1.0, 2.0);
    let cdf = NumericCdf::solve(&p, &GridSpec::standard(&p)).unwrap();
    assert!((cdf.cdf(0.7).unwrap() - 2.0 / 3.0).abs() < 1e-2);
    for x in [-5.0, -1.0, 0.0, 2.5, 6.0] {
        assert!(
            (cdf.cdf(x).unwrap() - g_cdf(x, &p).unwrap()).abs() < 1e-2,
            "x = {x}"
        );
    }
    assert!(matches!(cdf.cdf(0.7 + 14.0), Err(GvarError::Range(_))));
}

#[test]
fn expectation_of_identity_is_the_mean() {
    for sigma in [(0.5, 0.5), (0.5, 1.5), (1.0, 2.0)] {
        let p = params(0.3, sigma.0, sigma.1);
        let e = expectation_of(|z| z, &p, &GridSpec::standard(&p)).unwrap();
        assert!((e - 0.3).abs() < 1e-3, "{e}");
    }
}

#[test]
fn unstable_grid_is_rejected() {
    let p = params(0.0, 1.0, 2.0);
    let mut spec = GridSpec::standard(&p);
    spec.dt *= 1.5;
    assert!(matches!(
        solve_gheat(&p, step_indicator, 1.0, &spec),
        Err(GvarError::Config(_))
    ));
    let mut steps = 0;
    let _ = solve_gheat_observed(&p, step_indicator, 1.0, &spec, |_, _| steps += 1);
    assert_eq!(steps, 0);
    assert!(solve_gheat(&p, step_indicator, 0.0, &GridSpec::standard(&p)).is_err());
}

#[test]
fn comparison_principle_at_every_step() {
    let p = params(0.0, 0.6, 1.4);
    let spec = GridSpec::symmetric(&p, 8.0, 241);
    let pairs: [Pair; 3] = [
        (|x| step_indicator(x - 0.5), step_indicator),
        (
            |x| x.abs().min(3.0),
            |x| x.abs().min(3.0) + 0.1 * (x.sin() + 1.0),
        ),
        (|x| -x.abs().min(4.0), |x| -0.5 * x.abs().min(4.0)),
    ];
    for (a, b) in pairs {
        let mut snapshots = Vec::new();
        solve_gheat_observed(&p, a, 1.0, &spec, |_, u| snapshots.push(u.to_vec())).unwrap();
        let mut step = 0;
        solve_gheat_observed(&p, b, 1.0, &spec, |_, u| {
            for (ua, ub) in snapshots[step].iter().zip(u) {
                assert!(ua <= ub, "step {step}: {ua} > {ub}");
            }
            step += 1;
        })
        .unwrap();
        assert_eq!(step, snapshots.len());
    }
}

#[test]
fn solution_stays_within_initial_bounds() {
    let p = params(0.0, 0.5, 2.0);
    let spec = GridSpec::symmetric(&p, 8.0, 321);
    let payoffs: [fn(f64) -> f64; 3] = [
        step_indicator,
        |x| (x * 0.7).sin(),
        |x| (x * x).min(9.0) - 2.0,
    ];
    for phi in payoffs {
        let init: Vec<f64> = (0..spec.nx).map(|i| phi(spec.node(i))).collect();
        let lo = init.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = init.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        solve_gheat_observed(&p, phi, 1.0, &spec, |_, u| {
            assert!(u.iter().all(|&v| v >= lo && v <= hi));
        })
        .unwrap();
    }
}

#[test]
fn sublinearity_panel() {
    let p = params(0.1, 0.7, 1.6);
    let spec = GridSpec::standard(&p);
    let panel: [Pair; 5] = [
        (|z| z, |z| -z),
        (|z| z * z, |z| -z * z),
        (|z| (z - 0.5).max(0.0), |z| (-z - 0.5).max(0.0)),
        (|z| step_indicator(z), |z| -step_indicator(z - 1.0)),
        (|z| z.sin(), |z| (2.0 * z).cos() - z.abs()),
    ];
    for (i, (f, g)) in panel.into_iter().enumerate() {
        let sum = expectation_of(|z| f(z) + g(z), &p, &spec).unwrap();
        let ef = expectation_of(f, &p, &spec).unwrap();
        let eg = expectation_of(g, &p, &spec).unwrap();
        assert!(sum <= ef + eg + 1e-9, "pair {i}: {sum} > {ef} + {eg}");
    }
}

#[test]
fn halving_dx_reduces_error() {
    for (lo, hi) in [(1.0, 1.0), (0.5, 1.5), (1.0, 2.0)] {
        let p = params(0.0, lo, hi);
        let coarse = sup_error(&p, 201);
        let fine = sup_error(&p, 401);
        assert!(
            coarse / fine >= 1.5,
            "({lo}, {hi}): {coarse:.3e} -> {fine:.3e}"
        );
    }
}
