//! `operlab`: run the algebraic checks, the harmonic-metric solver, R-sweeps
//! and holonomy comparisons from a JSON config.
//!
//! Exit codes: 0 all checks pass, 1 a check fails or a run errors,
//! 2 usage or configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use config::{ConfigError, Group, RunConfig};
use output::Artifacts;

#[derive(Parser)]
#[command(
    name = "operlab",
    version,
    about = "Higgs bundles, opers and the conformal limit on a genus-2 surface"
)]
struct Cli {
    /// JSON run configuration; every field is optional.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory; overrides the config and OPERLAB_OUTPUT_DIR.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Principal-triple, pairing and involution identities.
    LieCheck {
        #[arg(long, conflicts_with = "cartan")]
        sln: Option<usize>,
        #[arg(long)]
        cartan: Option<String>,
    },
    /// Transition cocycle, error term, gauge identity and operator dictionary.
    OperCheck,
    /// Solve the harmonic-metric equation at one radius.
    Solve {
        #[arg(long)]
        r: Option<f64>,
    },
    /// Solve over a grid of radii and fit the order of convergence.
    Sweep,
    /// Compare holonomy traces of the limit family and the oper.
    Holonomy {
        /// Also recompute traces after a smooth gauge transformation.
        #[arg(long)]
        gauge_perturbation: bool,
    },
    /// Oper identities for a general simple group in the adjoint representation.
    Gcheck {
        #[arg(long)]
        cartan: Option<String>,
    },
    /// Summarize the verdicts stored in the output directory.
    Report,
}

fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::LieCheck { sln: Some(n), .. } => cfg.group = Group::Sln(*n),
        Command::LieCheck { cartan: Some(t), .. } | Command::Gcheck { cartan: Some(t) } => {
            cfg.group = Group::Cartan(t.clone())
        }
        Command::Solve { r: Some(r) } => cfg.r = *r,
        Command::Holonomy {
            gauge_perturbation: true,
        } => cfg.gauge_perturbation = true,
        _ => {}
    }
    cfg.solver.threads = cli.threads.unwrap_or_else(operlab::parallel::available_threads);
    if cfg.solver.threads == 0 {
        return Err(ConfigError("--threads must be positive".into()));
    }
    if let Some(out) = &cli.out {
        cfg.outputs = out.clone();
    } else if let Some(env) = std::env::var_os(config::OUTPUT_DIR_ENV) {
        cfg.outputs = PathBuf::from(env);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<bool> {
    let mut art = Artifacts::new(&cfg.outputs, cfg.hash())?;
    let (name, report) = match cli.command {
        Command::LieCheck { .. } => ("lie_check", commands::lie_check(cfg)?),
        Command::OperCheck => ("oper_check", commands::oper_check(cfg)?),
        Command::Solve { .. } => ("solve", commands::solve(cfg, &mut art)?),
        Command::Sweep => ("sweep", commands::sweep(cfg, &mut art)?),
        Command::Holonomy { .. } => ("holonomy_check", commands::holonomy_cmd(cfg, &mut art)?),
        Command::Gcheck { .. } => ("gcheck", commands::gcheck(cfg)?),
        Command::Report => ("report", commands::report(&mut art)?),
    };
    let stored = art.json(&format!("{name}.json"), &report.body)?;
    println!("{}", serde_json::to_string_pretty(&stored)?);
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("operlab: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&cli, &cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("operlab: check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("operlab: {e:#}");
            ExitCode::from(1)
        }
    }
}
