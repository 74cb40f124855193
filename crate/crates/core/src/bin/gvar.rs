//! `gvar`: command-line front end for the G-VaR engine.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::{Datelike, NaiveDate};
use clap::{Args, Parser, Subcommand};

use gvar_core::error::{GvarError, Result};
use gvar_core::gheat::{compare_with_closed_form, GridSpec};
use gvar_core::gnormal::GNormalParams;
use gvar_core::pipeline::config::{parse_date, parse_range};
use gvar_core::pipeline::report::{
    write_forecast_table, write_grid_table, write_pde_check, write_returns, write_summary,
};
use gvar_core::pipeline::{
    backtest_records, gaussian_var_baseline, grid_search, load_series, run_gvar,
    simulate_regime_switching, ArMode, ConfigOverrides, EngineConfig, ForecastRecord, Regime,
    RegimeSwitching,
};

#[derive(Parser)]
#[command(
    name = "gvar",
    version,
    about = "G-normal value-at-risk forecasting and backtesting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a price file and print the scaled log-returns.
    Ingest {
        input: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Rolling G-VaR forecasts as a per-date table.
    Forecast(EngineArgs),
    /// Forecasts plus the backtest summary row.
    Backtest(EngineArgs),
    /// Score every (K, L) cell on the selected range.
    Grid(EngineArgs),
    /// Rolling Gaussian VaR backtest.
    Baseline(EngineArgs),
    /// Write a synthetic regime-switching price series.
    Simulate(SimulateArgs),
    /// Dump closed-form vs finite-difference upper CDF values.
    PdeCheck(PdeArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Price file (`date,close`) or return file (`date,z`).
    input: PathBuf,
    /// `key = value` configuration file; flags override it.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output file for the main table (stdout by default).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Output file for the summary row (`backtest` and `baseline`; stdout by default).
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(short = 'k', long)]
    k: Option<usize>,
    #[arg(short = 'l', long)]
    l: Option<usize>,
    #[arg(short = 'n', long)]
    n: Option<usize>,
    #[arg(long, value_parser = date_arg)]
    start: Option<NaiveDate>,
    #[arg(long, value_parser = date_arg)]
    end: Option<NaiveDate>,
    /// Keep only the last N forecast dates.
    #[arg(long)]
    last: Option<usize>,
    #[arg(long, value_parser = range_arg)]
    k_range: Option<std::ops::RangeInclusive<usize>>,
    #[arg(long, value_parser = range_arg)]
    l_range: Option<std::ops::RangeInclusive<usize>>,
    /// daily, fixed or identity.
    #[arg(long)]
    ar_mode: Option<String>,
    /// Also print the Gaussian baseline summary (`backtest` only).
    #[arg(long)]
    baseline: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    sigma_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    sigma_hi: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.02)]
    switch_prob: f64,
    /// Start in the low-volatility regime.
    #[arg(long)]
    start_low: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PdeArgs {
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    sigma_hi: f64,
    #[arg(long, default_value_t = gvar_core::gheat::DEFAULT_NODES)]
    nodes: usize,
}

fn date_arg(s: &str) -> std::result::Result<NaiveDate, String> {
    parse_date(s).ok_or_else(|| format!("expected YYYY-MM-DD, got `{s}`"))
}

fn range_arg(s: &str) -> std::result::Result<std::ops::RangeInclusive<usize>, String> {
    parse_range(s).ok_or_else(|| format!("expected LO..HI, got `{s}`"))
}

impl EngineArgs {
    fn engine_config(&self) -> Result<EngineConfig> {
        let file = match &self.config {
            Some(path) => ConfigOverrides::load(path)?,
            None => ConfigOverrides::default(),
        };
        let flags = ConfigOverrides {
            alpha: self.alpha,
            k: self.k,
            l: self.l,
            n: self.n,
            start: self.start,
            end: self.end,
            last: self.last,
            k_range: self.k_range.clone(),
            l_range: self.l_range.clone(),
            ar_mode: self
                .ar_mode
                .as_deref()
                .map(str::parse::<ArMode>)
                .transpose()?,
            baseline: self.baseline,
            seed: self.seed,
        };
        file.merged_with(flags).apply(EngineConfig::default())
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_backtest(args: &EngineArgs, records: &[ForecastRecord], alpha: f64) -> Result<()> {
    let report = backtest_records(records, alpha)?;
    if let Some(path) = &args.out {
        write_forecast_table(BufWriter::new(File::create(path)?), records)?;
    }
    let mut out = open_out(&args.summary)?;
    write_summary(&mut out, &report)?;
    out.flush()?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { input, out } => {
            let series = load_series(&input)?;
            let mut w = open_out(&out)?;
            write_returns(&mut w, &series)?;
            w.flush()?;
        }
        Command::Forecast(args) => {
            let cfg = args.engine_config()?;
            let records = run_gvar(&load_series(&args.input)?, &cfg)?;
            let mut w = open_out(&args.out)?;
            write_forecast_table(&mut w, &records)?;
            w.flush()?;
        }
        Command::Backtest(args) => {
            let cfg = args.engine_config()?;
            let series = load_series(&args.input)?;
            let records = run_gvar(&series, &cfg)?;
            write_backtest(&args, &records, cfg.alpha)?;
            if cfg.baseline {
                let base = gaussian_var_baseline(&series, &cfg)?;
                let report = backtest_records(&base, cfg.alpha)?;
                eprintln!("gaussian baseline:");
                write_summary(io::stderr().lock(), &report)?;
            }
        }
        Command::Baseline(args) => {
            let cfg = args.engine_config()?;
            let records = gaussian_var_baseline(&load_series(&args.input)?, &cfg)?;
            write_backtest(&args, &records, cfg.alpha)?;
        }
        Command::Grid(args) => {
            let cfg = args.engine_config()?;
            let grid = grid_search(&load_series(&args.input)?, &cfg)?;
            let mut w = open_out(&args.out)?;
            write_grid_table(&mut w, &grid)?;
            w.flush()?;
            eprintln!(
                "selected K={} L={} (criterion: min |alpha_hat - alpha|)",
                grid.best.0, grid.best.1
            );
        }
        Command::Simulate(args) => {
            let mut spec = RegimeSwitching::new(
                args.n,
                args.sigma_lo,
                args.sigma_hi,
                args.mu,
                args.switch_prob,
            );
            if args.start_low {
                spec = spec.starting_in(Regime::Low);
            }
            let series = simulate_regime_switching(&spec, args.seed)?;
            let mut w = open_out(&args.out)?;
            // Prices start at 100 on the weekday before the first return.
            writeln!(w, "date,close")?;
            let mut first = series.dates()[0] - chrono::Duration::days(1);
            while first.weekday().number_from_monday() > 5 {
                first -= chrono::Duration::days(1);
            }
            let mut price = 100.0_f64;
            writeln!(w, "{first},{price}")?;
            for (d, z) in series.dates().iter().zip(series.values()) {
                price *= (z / 100.0).exp();
                writeln!(w, "{d},{price}")?;
            }
            w.flush()?;
        }
        Command::PdeCheck(args) => {
            let p = GNormalParams::new(args.mu, args.sigma_lo, args.sigma_hi)?;
            let spec = GridSpec::symmetric(&p, gvar_core::gheat::DEFAULT_HALF_WIDTH, args.nodes);
            let rows = compare_with_closed_form(&p, &spec)?;
            let sup = rows
                .iter()
                .map(|r| r.difference().abs())
                .fold(0.0, f64::max);
            let mut w = open_out(&args.out)?;
            write_pde_check(&mut w, &rows)?;
            w.flush()?;
            eprintln!("sup |numeric - closed form| = {sup:.3e}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &GvarError) -> u8 {
    err.exit_code() as u8
}
