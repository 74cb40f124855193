//! The `gvar` binary: subcommands, config precedence and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn gvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gvar"))
        .args(args)
        .output()
        .unwrap()
}

fn simulate(dir: &Path, n: usize) -> String {
    let path = dir.join("prices.csv");
    let out = gvar(&[
        "simulate",
        "--n",
        &n.to_string(),
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    path.to_str().unwrap().to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn simulate_then_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let prices = simulate(dir.path(), 50);
    let text = std::fs::read_to_string(&prices).unwrap();
    assert_eq!(text.lines().next(), Some("date,close"));
    assert_eq!(text.lines().nth(1), Some("1999-12-31,100"));
    assert_eq!(text.lines().count(), 52);

    let out = gvar(&["ingest", &prices]);
    assert!(out.status.success());
    let echoed = stdout(&out);
    assert_eq!(echoed.lines().next(), Some("date,z"));
    assert_eq!(echoed.lines().count(), 51);
    assert!(echoed.lines().nth(1).unwrap().starts_with("2000-01-03,"));
}

#[test]
fn forecast_and_backtest_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let prices = simulate(dir.path(), 400);
    let first = gvar(&["forecast", &prices, "-k", "5", "-l", "10"]);
    let second = gvar(&["forecast", &prices, "-k", "5", "-l", "10"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let table = stdout(&first);
    assert_eq!(
        table.lines().next(),
        Some("date,z,r_tilde,sigma_lo_tilde,sigma_hi_tilde,g_var,violation")
    );
    assert_eq!(table.lines().count(), 1 + 400 - 113);

    let forecasts = dir.path().join("f.csv");
    let out = gvar(&["backtest", &prices, "--out", forecasts.to_str().unwrap()]);
    assert!(out.status.success());
    let summary = stdout(&out);
    assert_eq!(
        summary.lines().next(),
        Some("horizon,alpha_hat,lr_uc,lr_ind,mean_var")
    );
    assert!(summary.lines().nth(1).unwrap().starts_with("287,"));
    assert_eq!(std::fs::read_to_string(forecasts).unwrap(), table);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let prices = simulate(dir.path(), 400);
    let cfg = dir.path().join("engine.cfg");
    std::fs::write(&cfg, "# test\nk = 6\nl = 8\nlast = 50\n").unwrap();
    let from_file = gvar(&["forecast", &prices, "--config", cfg.to_str().unwrap()]);
    assert_eq!(stdout(&from_file).lines().count(), 51);
    let overridden = gvar(&[
        "forecast",
        &prices,
        "--config",
        cfg.to_str().unwrap(),
        "--last",
        "20",
    ]);
    assert_eq!(stdout(&overridden).lines().count(), 21);
    let explicit = gvar(&["forecast", &prices, "-k", "6", "-l", "8", "--last", "20"]);
    assert_eq!(overridden.stdout, explicit.stdout);
}

#[test]
fn grid_baseline_and_pde_check() {
    let dir = tempfile::tempdir().unwrap();
    let prices = simulate(dir.path(), 400);
    let out = gvar(&["grid", &prices, "--k-range", "4..5", "--l-range", "5-6"]);
    assert!(out.status.success());
    let grid = stdout(&out);
    assert_eq!(grid.lines().count(), 5);
    assert_eq!(grid.lines().filter(|l| l.ends_with(",best")).count(), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("selected K="));

    let out = gvar(&["baseline", &prices, "-n", "250"]);
    assert!(out.status.success());
    assert!(stdout(&out).lines().nth(1).unwrap().starts_with("150,"));

    let out = gvar(&["pde-check", "--nodes", "401"]);
    assert!(out.status.success());
    let rows = stdout(&out);
    assert_eq!(
        rows.lines().next(),
        Some("x,closed_form,numeric,difference")
    );
    assert!(rows.lines().count() > 300);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    assert_eq!(
        gvar(&["forecast", missing.to_str().unwrap()]).status.code(),
        Some(3)
    );

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "date,close\n2020-01-02,100\n2020-01-03,-1\n").unwrap();
    let out = gvar(&["ingest", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));

    let prices = simulate(dir.path(), 100);
    assert_eq!(gvar(&["forecast", &prices]).status.code(), Some(4));
    assert_eq!(
        gvar(&["forecast", &prices, "--alpha", "0.7"]).status.code(),
        Some(2)
    );
    assert_eq!(
        gvar(&["forecast", &prices, "--ar-mode", "weekly"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        gvar(&["pde-check", "--sigma-lo", "3"]).status.code(),
        Some(2)
    );
}
