use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kbest_cli::{cmd_asymptotic, cmd_compare, cmd_convergence, cmd_figure, cmd_simulate, CliError, Report, RunConfig};
use kbest_core::presets::FigureId;

/// Asymptotic and Monte Carlo analysis of k-th best user selection in
/// underlay cognitive radio.
#[derive(Parser, Debug)]
#[command(name = "kbest", version)]
struct Cli {
    /// Run configuration (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Monte Carlo trials (samples for `convergence`).
    #[arg(long, global = true)]
    trials: Option<u64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative tolerance for `compare`.
    #[arg(long, global = true, default_value_t = 0.02)]
    rel_tol: f64,
    /// Worker threads for simulation; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic values over the configured grid.
    Asymptotic,
    /// Monte Carlo estimates over the configured grid.
    Simulate,
    /// Asymptotic against Monte Carlo; exits 1 if any point is out of tolerance.
    Compare,
    /// KS distance to the limiting law as the user count grows.
    Convergence,
    /// Data for one of the standard figures.
    Figure {
        /// fig2 .. fig9
        id: String,
    },
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(n) = cli.trials {
        cfg.n_trials = n;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_path = Some(o.clone());
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = load(cli)?;
    let report: Report = match &cli.command {
        Command::Asymptotic => cmd_asymptotic(&cfg)?,
        Command::Simulate => cmd_simulate(&cfg)?,
        Command::Compare => cmd_compare(&cfg, cli.rel_tol)?,
        Command::Convergence => cmd_convergence(&cfg)?,
        Command::Figure { id } => {
            let id: FigureId = id.parse().map_err(|e: kbest_core::Error| CliError::Config(e.to_string()))?;
            cmd_figure(id, cfg.n_trials, cfg.seed)?
        }
    };
    match &cfg.output_path {
        Some(path) => fs::write(path, &report.csv)?,
        None => std::io::stdout().write_all(report.csv.as_bytes())?,
    }
    let code = report.outcome.exit_code();
    if code != 0 {
        eprintln!("kbest: {:?}", report.outcome);
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(CliError::Config(format!("thread pool: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("kbest: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
