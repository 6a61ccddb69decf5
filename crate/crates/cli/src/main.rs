//! `morphogrow`: run growth simulations, oracle comparisons, figure data
//! and Lipschitz probes from a flat key-value config.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver error,
//! 4 envelope or assumption violation.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use commands::CmdError;
use config::RunConfig;
use output::RunDir;

/// Default output root when `--out` is absent.
const OUT_ENV: &str = "MORPHOGROW_OUT";

#[derive(Debug, Parser)]
#[command(name = "morphogrow", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the growth law and write trajectory, stress and nutrient files.
    Simulate(RunArgs),
    /// Compare the grid solver with the two-segment closed form.
    OracleCompare(RunArgs),
    /// Emit plot data for the growth map, elastic map and nutrient profile.
    Figures(RunArgs),
    /// Sample random growth pairs and report empirical Lipschitz ratios.
    Probe {
        #[command(flatten)]
        args: RunArgs,
        /// Number of pairs; overrides `probe.pairs`.
        #[arg(long)]
        pairs: Option<usize>,
    },
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Configuration file.
    config: PathBuf,
    /// Output directory (default: `$MORPHOGROW_OUT/<config stem>`, or `runs/<config stem>`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized probes; overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

fn out_dir(args: &RunArgs) -> PathBuf {
    if let Some(dir) = &args.out {
        return dir.clone();
    }
    let root = std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from("runs"), PathBuf::from);
    let stem = args
        .config
        .file_stem()
        .map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    root.join(stem)
}

fn execute(name: &str, args: &RunArgs, pairs: Option<usize>) -> Result<PathBuf, CmdError> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(p) = pairs {
        cfg.probe.pairs = p;
    }
    let seed = args.seed.unwrap_or(cfg.seed);
    let dir = out_dir(args);
    let mut run = RunDir::create(&dir, name, &args.config, seed, cfg.echo.clone())?;
    let result = match name {
        "simulate" => commands::simulate::run(&cfg, &mut run),
        "oracle-compare" => commands::oracle::run(&cfg, &mut run),
        "figures" => commands::figures::run(&cfg, &mut run),
        _ => commands::probe::run(&cfg, seed, &mut run),
    };
    match result {
        Ok(()) => {
            run.finish("ok", None)?;
            Ok(dir)
        }
        Err(e) => {
            run.finish(e.status(), Some(e.to_string()))?;
            Err(e)
        }
    }
}

fn report(path: &Path) {
    println!("{}", path.display());
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => execute("simulate", a, None),
        Command::OracleCompare(a) => execute("oracle-compare", a, None),
        Command::Figures(a) => execute("figures", a, None),
        Command::Probe { args, pairs } => execute("probe", args, *pairs),
    };
    match result {
        Ok(dir) => {
            report(&dir);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("morphogrow: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
