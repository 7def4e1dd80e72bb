use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::options::SolverOptions;
use crate::pinl::InnerSolver;
use crate::report::SolveReport;
use crate::system::NonlinearSystem;

/// Top-level solver selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Inb,
    Ardn,
    Pinl,
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inb" => Ok(Self::Inb),
            "ardn" => Ok(Self::Ardn),
            "pinl" => Ok(Self::Pinl),
            other => Err(format!("unknown solver `{other}` (expected inb | ardn | pinl)")),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Inb => "inb",
            Self::Ardn => "ardn",
            Self::Pinl => "pinl",
        })
    }
}

/// Dispatches to the selected solver. `inner` only matters for [`SolverKind::Pinl`].
pub fn solve(
    kind: SolverKind,
    inner: InnerSolver,
    system: &dyn NonlinearSystem,
    x0: &[f64],
    options: &SolverOptions,
) -> Result<SolveReport, SolveError> {
    match kind {
        SolverKind::Inb => crate::inb::inb_solve(system, x0, options),
        SolverKind::Ardn => crate::ardn::ardn_solve(system, x0, options),
        SolverKind::Pinl => crate::pinl::pinl_solve(system, x0, options, inner),
    }
}
