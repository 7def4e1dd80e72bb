//! Per-iteration records, solve reports, and the stopping/stagnation tests.

use serde::{Deserialize, Serialize};
use std::io;
use std::path::Path;

use crate::options::SolverOptions;

/// Absolute-or-relative residual test: `current <= max(abs_tol, rel_tol * initial)`.
pub fn stopping_satisfied(current_norm: f64, initial_norm: f64, options: &SolverOptions) -> bool {
    current_norm <= options.abs_tol.max(options.rel_tol * initial_norm)
}

/// An iteration is stagnant when `| ||F_k|| - ||F_{k-1}|| | <= tau * ||F_k||`.
///
/// A zero current norm is never stagnant: the solve has converged.
pub fn is_stagnant(norm_k: f64, norm_km1: f64, tau: f64) -> bool {
    if norm_k == 0.0 {
        return false;
    }
    (norm_k - norm_km1).abs() <= tau * norm_k
}

/// One accepted Newton step `X^{k-1} -> X^k`.
///
/// The merit and directional values are those of the merit function that was
/// active during the step's line search, so the sufficient-decrease test can
/// be replayed from the record alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// `||F(X^k)||`.
    pub residual_norm: f64,
    pub step_length: f64,
    pub line_search_count: usize,
    pub forcing_term: f64,
    pub stagnant: bool,
    pub line_search_satisfied: bool,
    pub merit_before: f64,
    pub merit_after: f64,
    /// `grad f(X^{k-1})^T S^{k-1}`.
    pub directional_term: f64,
    pub gmres_iterations: usize,
    pub gmres_relative_residual: f64,
    /// `||F'S + F|| / ||F||` recomputed after the linear solve, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linear_residual_check: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationLimit,
    /// The residual became non-finite at every line-search trial of a step.
    NonFiniteResidual { iteration: usize },
}

/// Breakdown of a PIN^L run into its training, subspace and global phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinlPhases {
    pub inner: String,
    /// Number of training iterates `X^0 .. X^{s-1}` collected.
    pub training_iterations: usize,
    pub training_residual_norms: Vec<f64>,
    pub training_time: f64,
    pub subspace_iterations: usize,
    /// `||F(Y^j)||` for `j = 1 ..= subspace_iterations`.
    pub subspace_residual_norms: Vec<f64>,
    /// `||PP^T(F(Y^j) - Fbar) + Fbar||` for `j = 0 ..= subspace_iterations`.
    pub subspace_projected_norms: Vec<f64>,
    pub subspace_converged: bool,
    /// The projected Jacobian was singular and the last training iterate was used instead.
    pub subspace_fallback: bool,
    pub subspace_time: f64,
    pub global_iterations: usize,
    pub global_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solver: String,
    pub final_point: Vec<f64>,
    pub converged: bool,
    pub termination: Termination,
    pub n_ite: usize,
    /// Seconds.
    pub wall_time: f64,
    pub n_sta: usize,
    pub initial_residual_norm: f64,
    pub final_residual_norm: f64,
    pub history: Vec<IterationRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinl: Option<PinlPhases>,
}

impl SolveReport {
    pub(crate) fn new(
        solver: impl Into<String>,
        final_point: Vec<f64>,
        termination: Termination,
        wall_time: f64,
        initial_residual_norm: f64,
        history: Vec<IterationRecord>,
    ) -> Self {
        let final_residual_norm = history
            .last()
            .map_or(initial_residual_norm, |r| r.residual_norm);
        Self {
            solver: solver.into(),
            final_point,
            converged: termination == Termination::Converged,
            termination,
            n_ite: history.len(),
            wall_time,
            n_sta: history.iter().filter(|r| r.stagnant).count(),
            initial_residual_norm,
            final_residual_norm,
            history,
            pinl: None,
        }
    }

    /// `||F(X^0)||, ||F(X^1)||, ...` including the initial point.
    pub fn residual_norms(&self) -> Vec<f64> {
        std::iter::once(self.initial_residual_norm)
            .chain(self.history.iter().map(|r| r.residual_norm))
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let json = self.to_json().map_err(io::Error::other)?;
        std::fs::write(path, json)
    }

    /// History as CSV: `k,residual_norm,step_length,line_search_count,forcing_term,stagnant`.
    pub fn write_history_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(HISTORY_CSV_HEADER)?;
        for r in &self.history {
            w.write_record([
                r.k.to_string(),
                format!("{:e}", r.residual_norm),
                format!("{:e}", r.step_length),
                r.line_search_count.to_string(),
                format!("{:e}", r.forcing_term),
                r.stagnant.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub const HISTORY_CSV_HEADER: [&str; 6] = [
    "k",
    "residual_norm",
    "step_length",
    "line_search_count",
    "forcing_term",
    "stagnant",
];

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(k: usize, norm: f64, stagnant: bool) -> IterationRecord {
        IterationRecord {
            k,
            residual_norm: norm,
            step_length: 1.0,
            line_search_count: 0,
            forcing_term: 0.25,
            stagnant,
            line_search_satisfied: true,
            merit_before: 1.0,
            merit_after: 0.5,
            directional_term: -1.0,
            gmres_iterations: 1,
            gmres_relative_residual: 0.0,
            linear_residual_check: None,
            weight_min: None,
            weight_max: None,
        }
    }

    #[test]
    fn stopping_rule_examples() {
        let o = SolverOptions::default();
        assert!(stopping_satisfied(1e-9, 1.0, &o));
        assert!(!stopping_satisfied(1e-7, 1.0, &o));
        assert!(stopping_satisfied(0.5, 1e12, &o));
    }

    #[test]
    fn stagnation_examples() {
        assert!(is_stagnant(1.0, 1.0, 1e-6));
        assert!(!is_stagnant(1.0, 0.5, 1e-6));
        assert!(is_stagnant(1.0, 1.0 + 5e-7, 1e-6));
        assert!(!is_stagnant(0.0, 0.0, 1e-6));
    }

    #[test]
    fn report_counts_follow_history() {
        let h = vec![record(1, 0.5, false), record(2, 0.5, true), record(3, 1e-9, false)];
        let r = SolveReport::new("inb", vec![0.0], Termination::Converged, 0.0, 1.0, h);
        assert_eq!(r.n_ite, 3);
        assert_eq!(r.n_sta, 1);
        assert!(r.converged);
        assert_eq!(r.final_residual_norm, 1e-9);
        assert_eq!(r.residual_norms(), vec![1.0, 0.5, 0.5, 1e-9]);
    }

    #[test]
    fn history_csv_has_fixed_header() {
        let r = SolveReport::new(
            "inb",
            vec![0.0],
            Termination::IterationLimit,
            0.0,
            1.0,
            vec![record(1, 0.5, true)],
        );
        let mut buf = Vec::new();
        r.write_history_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k,residual_norm,step_length,line_search_count,forcing_term,stagnant"
        );
        assert_eq!(lines.next().unwrap(), "1,5e-1,1e0,0,2.5e-1,true");
    }

    #[test]
    fn json_round_trip() {
        let r = SolveReport::new(
            "ardn",
            vec![1.0, 2.0],
            Termination::NonFiniteResidual { iteration: 3 },
            0.1,
            2.0,
            vec![record(1, 1.0, false)],
        );
        let back = SolveReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        assert!(!back.converged);
    }

    proptest! {
        #[test]
        fn n_sta_matches_recount(flags in proptest::collection::vec(any::<bool>(), 0..50)) {
            let h: Vec<_> = flags.iter().enumerate().map(|(i, &s)| record(i + 1, 1.0, s)).collect();
            let r = SolveReport::new("inb", vec![], Termination::IterationLimit, 0.0, 1.0, h);
            prop_assert_eq!(r.n_sta, r.history.iter().filter(|x| x.stagnant).count());
            prop_assert_eq!(r.n_ite, r.history.len());
        }

        #[test]
        fn stopping_rule_is_monotone(x in 0.0f64..10.0, frac in 0.0f64..=1.0, init in 0.0f64..1e13) {
            let o = SolverOptions::default();
            if stopping_satisfied(x, init, &o) {
                prop_assert!(stopping_satisfied(x * frac, init, &o));
            }
        }
    }
}
