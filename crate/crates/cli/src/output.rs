//! Report files: JSON report, history CSV and plot data.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use newton_forge::SolveReport;

/// `problem solver N_ite T N_sta converged`
pub fn summary_line(problem: &str, solver: &str, report: &SolveReport) -> String {
    format!(
        "{problem} {solver} {} {:.4} {} {}",
        report.n_ite, report.wall_time, report.n_sta, report.converged
    )
}

/// `out.json` -> `out.history.csv`
pub fn history_path(out: &Path) -> PathBuf {
    sibling(out, "history.csv")
}

/// `out.json` -> `out.plot.dat`
pub fn plot_path(out: &Path) -> PathBuf {
    sibling(out, "plot.dat")
}

fn sibling(out: &Path, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{ext}"))
}

/// Writes the JSON report, its history CSV and plot data next to each other.
pub fn write_report_files(report: &SolveReport, out: &Path) -> Result<()> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    report.write_json(out).with_context(|| format!("cannot write {}", out.display()))?;

    let hist = history_path(out);
    let file = File::create(&hist).with_context(|| format!("cannot create {}", hist.display()))?;
    report.write_history_csv(file).with_context(|| format!("cannot write {}", hist.display()))?;

    let plot = plot_path(out);
    let file = File::create(&plot).with_context(|| format!("cannot create {}", plot.display()))?;
    write_plot_data(report, BufWriter::new(file)).with_context(|| format!("cannot write {}", plot.display()))?;
    Ok(())
}

/// Residual history as whitespace-separated columns `k residual_norm`.
///
/// PIN^L reports get a leading `phase` column and a running `k` across the
/// training, subspace and global phases. The global phase starts from the
/// last subspace iterate, so its initial norm is not repeated.
pub fn write_plot_data<W: Write>(report: &SolveReport, mut w: W) -> io::Result<()> {
    match &report.pinl {
        None => {
            writeln!(w, "# k residual_norm")?;
            for (k, r) in report.residual_norms().iter().enumerate() {
                writeln!(w, "{k} {r:.17e}")?;
            }
        }
        Some(ph) => {
            writeln!(w, "# phase k residual_norm")?;
            let global = report.history.iter().map(|h| h.residual_norm);
            let rows = ph
                .training_residual_norms
                .iter()
                .map(|&r| ("training", r))
                .chain(ph.subspace_residual_norms.iter().map(|&r| ("subspace", r)))
                .chain(global.map(|r| ("global", r)));
            for (k, (phase, r)) in rows.enumerate() {
                writeln!(w, "{phase} {k} {r:.17e}")?;
            }
        }
    }
    w.flush()
}
