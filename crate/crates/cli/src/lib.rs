//! Command-line driver for the newton-forge solvers: single runs, manifest
//! sweeps and plot-data export.

pub mod config;
pub mod output;
pub mod sweep;

use std::fs;
use std::io::{self, BufWriter};
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::LevelFilter;

use config::RunConfig;
use newton_forge::{solve, SolveReport, Termination};

#[derive(Debug, Parser)]
#[command(name = "newton-forge", version, about = "Inexact Newton solvers with residual-driven weighting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one benchmark problem.
    Run(Box<RunArgs>),
    /// Run every row of a JSON-lines manifest and write one CSV table.
    Sweep(SweepArgs),
    /// Convert a saved JSON report into plot data.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: RunConfig,
    /// JSON report path; the history CSV and plot data are written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// One JSON object per line with the same keys as the `run` flags.
    pub manifest: PathBuf,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of rows solved concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// A report written by `run --out`.
    pub report: PathBuf,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Log verbosity from `NEWTON_FORGE_LOG` (`quiet`, `summary`, `trace`).
pub fn log_level(value: Option<&str>) -> LevelFilter {
    match value.map(str::trim) {
        Some("quiet") => LevelFilter::Error,
        Some("trace") => LevelFilter::Trace,
        _ => LevelFilter::Info,
    }
}

pub fn init_logging() {
    let level = log_level(std::env::var("NEWTON_FORGE_LOG").ok().as_deref());
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .try_init();
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Run(args) => run(&args),
        Command::Sweep(args) => sweep_cmd(&args),
        Command::PlotData(args) => plot_data(&args),
    }
}

fn run(args: &RunArgs) -> Result<u8> {
    let cfg = &args.config;
    let (spec, opts) = cfg.build()?;
    log::info!("solving {} with {}", spec.name, cfg.solver_label());
    let report = solve(cfg.solver, cfg.inner, &*spec.system, &spec.initial_guess, &opts)
        .with_context(|| format!("{} failed on {}", cfg.solver_label(), spec.name))?;
    if let Some(out) = &args.out {
        output::write_report_files(&report, out)?;
        log::info!("report written to {}", out.display());
    }
    println!("{}", output::summary_line(cfg.problem.as_str(), &cfg.solver_label(), &report));
    Ok(exit_code(&report))
}

/// Non-convergence is a normal outcome; a solve cut short by a non-finite
/// residual is not.
fn exit_code(report: &SolveReport) -> u8 {
    match report.termination {
        Termination::NonFiniteResidual { iteration } => {
            log::error!("solve aborted at iteration {iteration}: residual is not finite");
            1
        }
        _ => 0,
    }
}

fn sweep_cmd(args: &SweepArgs) -> Result<u8> {
    let text = fs::read_to_string(&args.manifest)
        .with_context(|| format!("cannot read manifest {}", args.manifest.display()))?;
    let rows = sweep::parse_manifest(&text);
    log::info!("{} rows, {} jobs", rows.len(), args.jobs.max(1));
    let records = sweep::run_sweep(&rows, args.jobs.max(1))?;
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            sweep::write_csv(&records, BufWriter::new(file))?;
        }
        None => sweep::write_csv(&records, io::stdout().lock())?,
    }
    let errors = records.iter().filter(|r| r.is_error()).count();
    if errors > 0 {
        log::error!("{errors} of {} rows failed", records.len());
        return Ok(1);
    }
    Ok(0)
}

fn plot_data(args: &PlotArgs) -> Result<u8> {
    let text = fs::read_to_string(&args.report).with_context(|| format!("cannot read {}", args.report.display()))?;
    let report = SolveReport::from_json(&text).with_context(|| format!("{} is not a solve report", args.report.display()))?;
    match &args.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            output::write_plot_data(&report, BufWriter::new(file))?;
        }
        None => output::write_plot_data(&report, io::stdout().lock())?,
    }
    Ok(0)
}
