//! One solve, as described either by command-line flags or by a manifest row.

use anyhow::{Context, Result};
use clap::Args;
use serde::{Deserialize, Serialize};

use newton_forge::problems::{self, BenchmarkSpec};
use newton_forge::{InnerSolver, ProblemId, ProblemParams, SolverKind, SolverOptions, WeightStrategy};

/// A (problem, solver, options) triple. Unset options keep the problem's
/// recommended settings.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// chemical | convdiff | p1 | p2 | p3 | p4 | p5
    #[arg(long)]
    pub problem: ProblemId,
    /// Number of unknowns (P1-P5).
    #[arg(long)]
    #[serde(default)]
    pub size: Option<usize>,
    /// Convection coefficient (convdiff).
    #[arg(long)]
    #[serde(default)]
    pub c: Option<f64>,
    /// Interior points per direction (convdiff).
    #[arg(long)]
    #[serde(default)]
    pub grid: Option<usize>,
    /// inb | ardn | pinl
    #[arg(long)]
    pub solver: SolverKind,
    /// Training/global solver for pinl.
    #[arg(long, default_value_t)]
    #[serde(default)]
    pub inner: InnerSolver,
    #[arg(long)]
    #[serde(default)]
    pub gmax: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub alpha_star: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub sigma1: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub sigma2: Option<f64>,
    /// Base decay rate of the weights.
    #[arg(long)]
    #[serde(default)]
    pub delta: Option<f64>,
    /// full | simplified1 | simplified2
    #[arg(long)]
    #[serde(default)]
    pub weight_strategy: Option<WeightStrategy>,
    /// PIN^L training size s.
    #[arg(long)]
    #[serde(default)]
    pub train_size: Option<usize>,
    /// PIN^L principal components d.
    #[arg(long)]
    #[serde(default)]
    pub components: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub subspace_rtol: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub atol: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub rtol: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    #[serde(default)]
    pub stagnation_tau: Option<f64>,
    /// GMRES restart length.
    #[arg(long)]
    #[serde(default)]
    pub restart: Option<usize>,
}

impl RunConfig {
    pub fn new(problem: ProblemId, solver: SolverKind) -> Self {
        Self {
            problem,
            size: None,
            c: None,
            grid: None,
            solver,
            inner: InnerSolver::default(),
            gmax: None,
            alpha_star: None,
            sigma1: None,
            sigma2: None,
            delta: None,
            weight_strategy: None,
            train_size: None,
            components: None,
            subspace_rtol: None,
            atol: None,
            rtol: None,
            max_iters: None,
            stagnation_tau: None,
            restart: None,
        }
    }

    pub fn params(&self) -> ProblemParams {
        ProblemParams { size: self.size, c: self.c, grid: self.grid }
    }

    /// Name used in summaries and tables: `pinl+ardn` for composed solvers.
    pub fn solver_label(&self) -> String {
        match self.solver {
            SolverKind::Pinl => format!("pinl+{}", self.inner),
            other => other.to_string(),
        }
    }

    /// Builds the benchmark and applies the overrides to its recommended options.
    pub fn build(&self) -> Result<(BenchmarkSpec, SolverOptions)> {
        let spec = problems::build(self.problem, self.params())
            .with_context(|| format!("cannot build problem `{}`", self.problem))?;
        let mut o = spec.options.clone();
        macro_rules! apply {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { o.$target = v; })*
            };
        }
        apply! {
            gmax => g_max,
            alpha_star => initial_learning_rate,
            sigma1 => sigma1,
            sigma2 => sigma2,
            delta => base_decay,
            weight_strategy => weight_strategy,
            train_size => pinl_training_size,
            components => pinl_components,
            subspace_rtol => pinl_subspace_rel_tol,
            atol => abs_tol,
            rtol => rel_tol,
            max_iters => max_newton_iters,
            stagnation_tau => stagnation_tau,
            restart => gmres_restart,
        }
        o.validate().context("invalid solver options")?;
        Ok((spec, o))
    }
}
