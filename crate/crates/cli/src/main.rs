mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

/// Simulation, density validation, pricing and calibration for the CGMYSV model.
#[derive(Debug, Parser)]
#[command(name = "cgmysv", version)]
struct Cli {
    /// TOML run configuration; built-in defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overriding the configuration.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Day-count basis for maturities given in days.
    #[arg(long, global = true, value_parser = ["365", "252"])]
    day_count: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate paths and summarise the distribution of L.
    Simulate,
    /// KS distances between simulated L and the Fourier-inverted CDF.
    Kstest,
    /// Density of L by Fourier inversion.
    Pdf,
    /// Price the configured options.
    Price,
    /// Calibrate to an option-chain CSV.
    Calibrate,
    /// Repeated pricing over sample sizes.
    Bootstrap,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = cli.out_dir {
        cfg.out_dir = d;
    }
    if let Some(d) = cli.day_count {
        cfg.day_count = d.parse().expect("validated by clap");
    }
    cfg.validate()?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let tables = match cli.command {
        Command::Simulate => commands::simulate(&cfg)?,
        Command::Kstest => commands::kstest(&cfg)?,
        Command::Pdf => commands::pdf(&cfg)?,
        Command::Price => commands::price(&cfg)?,
        Command::Bootstrap => commands::bootstrap_cmd(&cfg)?,
        Command::Calibrate => {
            let runs = commands::calibrate(&cfg)?;
            commands::write_calibration(&cfg.out_dir, &runs)?;
            for r in &runs {
                log::info!("{} calibration: rmse {:.6}", r.label, r.outcome_report.rmse);
            }
            return Ok(());
        }
    };
    for path in output::write_tables(&cfg.out_dir, &tables)? {
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
