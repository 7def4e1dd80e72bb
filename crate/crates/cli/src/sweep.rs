//! Batch runs from a JSON-lines manifest.

use std::io::Write;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use newton_forge::{solve, SolveReport};

/// One manifest line: its 1-based line number and the parsed row, or the
/// parse error.
pub type ManifestRow = (usize, Result<RunConfig, String>);

/// Parses a JSON-lines manifest. Blank lines and `#` comments are skipped;
/// malformed lines are kept as errored rows so the sweep can report them.
pub fn parse_manifest(text: &str) -> Vec<ManifestRow> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        })
        .map(|(i, l)| (i + 1, serde_json::from_str(l).map_err(|e| e.to_string())))
        .collect()
}

/// A row of the aggregate table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub line: usize,
    pub problem: String,
    pub size: Option<usize>,
    pub c: Option<f64>,
    pub grid: Option<usize>,
    pub solver: String,
    pub g_max: Option<usize>,
    pub alpha_star: Option<f64>,
    pub sigma1: Option<f64>,
    pub sigma2: Option<f64>,
    pub train_size: Option<usize>,
    pub components: Option<usize>,
    pub n_ite: Option<usize>,
    #[serde(rename = "T")]
    pub wall_time: Option<f64>,
    pub n_sta: Option<usize>,
    pub converged: Option<bool>,
    pub final_residual: Option<f64>,
    pub training_iterations: Option<usize>,
    pub subspace_iterations: Option<usize>,
    pub error: String,
}

impl SweepRecord {
    fn errored(line: usize, error: String) -> Self {
        Self {
            line,
            problem: String::new(),
            size: None,
            c: None,
            grid: None,
            solver: String::new(),
            g_max: None,
            alpha_star: None,
            sigma1: None,
            sigma2: None,
            train_size: None,
            components: None,
            n_ite: None,
            wall_time: None,
            n_sta: None,
            converged: None,
            final_residual: None,
            training_iterations: None,
            subspace_iterations: None,
            error,
        }
    }

    pub fn is_error(&self) -> bool {
        !self.error.is_empty()
    }
}

/// Runs a single row. Errors end up in the record, never in the return value.
pub fn run_row(line: usize, row: &RunConfig) -> SweepRecord {
    let mut rec = SweepRecord::errored(line, String::new());
    rec.problem = row.problem.to_string();
    rec.solver = row.solver_label();
    rec.size = row.size;
    rec.c = row.c;
    rec.grid = row.grid;

    let outcome = row.build().and_then(|(spec, opts)| {
        rec.size = rec.size.or(row.problem.default_size());
        rec.g_max = Some(opts.g_max);
        rec.alpha_star = Some(opts.initial_learning_rate);
        rec.sigma1 = Some(opts.sigma1);
        rec.sigma2 = Some(opts.sigma2);
        if row.solver == newton_forge::SolverKind::Pinl {
            rec.train_size = Some(opts.pinl_training_size);
            rec.components = Some(opts.pinl_components);
        }
        let start = Instant::now();
        let report = solve(row.solver, row.inner, &*spec.system, &spec.initial_guess, &opts)?;
        log::debug!("line {line}: {} {} done in {:.3}s", rec.problem, rec.solver, start.elapsed().as_secs_f64());
        Ok(report)
    });
    match outcome {
        Ok(report) => fill(&mut rec, &report),
        Err(e) => rec.error = format!("{e:#}"),
    }
    rec
}

fn fill(rec: &mut SweepRecord, report: &SolveReport) {
    rec.n_ite = Some(report.n_ite);
    rec.wall_time = Some(report.wall_time);
    rec.n_sta = Some(report.n_sta);
    rec.converged = Some(report.converged);
    rec.final_residual = Some(report.final_residual_norm);
    if let Some(ph) = &report.pinl {
        rec.training_iterations = Some(ph.training_iterations);
        rec.subspace_iterations = Some(ph.subspace_iterations);
    }
}

/// Runs every row on a pool of `jobs` threads. Output order follows the
/// manifest, whatever order the rows finish in.
pub fn run_sweep(rows: &[ManifestRow], jobs: usize) -> Result<Vec<SweepRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("cannot start the worker pool")?;
    Ok(pool.install(|| {
        rows.par_iter()
            .map(|(line, row)| match row {
                Ok(cfg) => run_row(*line, cfg),
                Err(e) => SweepRecord::errored(*line, format!("bad manifest line: {e}")),
            })
            .collect()
    }))
}

/// Writes the aggregate CSV; the header is written even with no rows.
pub fn write_csv<W: Write>(records: &[SweepRecord], w: W) -> Result<()> {
    let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    out.write_record([
        "line",
        "problem",
        "size",
        "c",
        "grid",
        "solver",
        "g_max",
        "alpha_star",
        "sigma1",
        "sigma2",
        "train_size",
        "components",
        "n_ite",
        "T",
        "n_sta",
        "converged",
        "final_residual",
        "training_iterations",
        "subspace_iterations",
        "error",
    ])?;
    for r in records {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
