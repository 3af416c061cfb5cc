//! Command-line front end for SIS PFD evaluation, estimation, schedule
//! optimisation and simulation.
//!
//! Each subcommand reads one JSON [`config::RunConfig`], prints a JSON
//! report (or writes it to `--out`), and optionally writes
//! `t_hours,unavailability` CSV curves.

pub mod commands;
pub mod config;
pub mod sil;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::commands::{CurveFile, Options};
use crate::config::{ConfigError, RunConfig};

/// Exit status for a run that completed, warnings included.
pub const EXIT_OK: i32 = 0;
/// Exit status for an unreadable or invalid configuration.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for any other failure.
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "sis-pfd",
    version,
    about = "PFD of MooN safety systems under partial and full tests"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// PFD per interval, PFDavg, maximum unavailability and SIL band.
    Evaluate(CommonArgs),
    /// Failure rate and partial-test efficiency from test records.
    Estimate(CommonArgs),
    /// Best placement of the partial tests within the full-test interval.
    Optimize(CommonArgs),
    /// Monte Carlo estimate of PFDavg.
    Simulate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Write the unavailability curve as CSV to this path.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Use the first-order formulas (evaluate, estimate --then-evaluate).
    #[arg(long)]
    pub approx: bool,
    /// Evaluate the policy with the estimated parameters (estimate).
    #[arg(long)]
    pub then_evaluate: bool,
    /// Simulation seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulation replications, overriding the config.
    #[arg(long)]
    pub replications: Option<u64>,
    /// Confidence level of the intervals, overriding the config.
    #[arg(long)]
    pub level: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Evaluate(a)
            | Command::Estimate(a)
            | Command::Optimize(a)
            | Command::Simulate(a) => a,
        }
    }
}

/// A finished run: the report text and the files to write.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub report: String,
    pub report_path: Option<PathBuf>,
    pub curves: Vec<CurveFile>,
}

fn render<T: Serialize>(report: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report).context("serializing the report")?;
    text.push('\n');
    Ok(text)
}

/// Run a subcommand without touching the filesystem beyond reading the
/// config.
pub fn execute(command: &Command) -> Result<Output> {
    let args = command.args();
    let config = RunConfig::from_path(&args.config)?;
    let opts = Options {
        curve: args.curve.clone(),
        approx: args.approx,
        then_evaluate: args.then_evaluate,
        seed: args.seed,
        replications: args.replications,
        level: args.level,
    };
    let (report, curves) = match command {
        Command::Evaluate(_) => {
            let (r, c) = commands::evaluate(&config, &opts)?;
            (render(&r)?, c)
        }
        Command::Estimate(_) => {
            let (r, c) = commands::estimate(&config, &opts)?;
            (render(&r)?, c)
        }
        Command::Optimize(_) => {
            let (r, c) = commands::optimize(&config, &opts)?;
            (render(&r)?, c)
        }
        Command::Simulate(_) => {
            let (r, c) = commands::simulate(&config, &opts)?;
            (render(&r)?, c)
        }
    };
    let report_path = args
        .out
        .clone()
        .or_else(|| config.output.as_ref().and_then(|o| o.report.clone()));
    Ok(Output {
        report,
        report_path,
        curves,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Run a subcommand, write its outputs, and return the exit status.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(&cli.command).and_then(|out| {
        for curve in &out.curves {
            write_file(&curve.path, &curve.contents)?;
        }
        match &out.report_path {
            Some(path) => write_file(path, &out.report),
            None => {
                print!("{}", out.report);
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    }
}

/// Configuration problems map to [`EXIT_CONFIG`], everything else to
/// [`EXIT_INTERNAL`].
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.chain().any(|e| e.is::<ConfigError>()) {
        EXIT_CONFIG
    } else {
        EXIT_INTERNAL
    }
}
