//! Inexact Newton with backtracking: forcing terms, the Armijo line search,
//! and the Newton loop shared with the weighted (ARDN) variant.

use std::time::Instant;

use crate::ardn::{update_coefficients, update_weights, weighted_directional_term, weighted_merit, WeightVector};
use crate::error::SolveError;
use crate::jacobian::Linearization;
use crate::linalg::{gmres, norm2, LinearOperator};
use crate::options::SolverOptions;
use crate::report::{is_stagnant, stopping_satisfied, IterationRecord, SolveReport, Termination};
use crate::system::NonlinearSystem;

/// Lower and upper safeguards for the Eisenstat-Walker forcing term.
const ETA_MIN: f64 = 1e-8;
const ETA_MAX: f64 = 0.9;

/// What the forcing term remembers from the previous Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingState {
    /// `||F(X^{k-1})||`
    pub previous_residual_norm: f64,
    /// `||F'(X^{k-1}) S^{k-1} + F(X^{k-1})||`
    pub previous_linear_model_norm: f64,
}

/// Eisenstat-Walker forcing term.
///
/// Returns `eta0` while `current_norm >= beta` (or on the first iteration),
/// and `| ||F_k|| - ||F'_{k-1} S_{k-1} + F_{k-1}|| | / ||F_{k-1}||`,
/// clamped to `[1e-8, 0.9]`, once the residual has dropped below `beta`.
pub fn forcing_term(state: Option<&ForcingState>, current_norm: f64, beta: f64, options: &SolverOptions) -> f64 {
    let Some(state) = state else {
        return options.eta0;
    };
    if current_norm >= beta || state.previous_residual_norm == 0.0 {
        return options.eta0;
    }
    let eta = (current_norm - state.previous_linear_model_norm).abs() / state.previous_residual_norm;
    eta.clamp(ETA_MIN, ETA_MAX)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchOutcome {
    pub step_length: f64,
    /// Number of step reductions, at most `g_max`.
    pub reductions: usize,
    pub satisfied: bool,
}

/// Backtracking on `merit` along `direction` from the full step `lambda = 1`.
///
/// Trial steps are `rho^i` for `i = 0 ..= g_max`; the first one satisfying
/// `merit(x + lambda S) <= merit(x) + alpha * lambda * directional_term` is
/// accepted and `i` is reported as the reduction count. When none does, the
/// loop falls through with one more reduction applied, so the step taken is
/// `rho^(g_max+1)`, flagged unsatisfied with `g_max` reductions reported.
/// Non-finite merit values reject the trial.
///
/// The trial point is passed to `merit`, so a caller can cache the residual
/// of the last evaluation: it always belongs to the returned step.
pub fn armijo_backtracking<M>(
    mut merit: M,
    x: &[f64],
    direction: &[f64],
    merit_at_x: f64,
    directional_term: f64,
    options: &SolverOptions,
) -> LineSearchOutcome
where
    M: FnMut(&[f64]) -> f64,
{
    let mut trial = vec![0.0; x.len()];
    let mut lambda = 1.0;
    for i in 0..=options.g_max {
        for ((t, xi), si) in trial.iter_mut().zip(x).zip(direction) {
            *t = xi + lambda * si;
        }
        let value = merit(&trial);
        if value.is_finite() && value <= merit_at_x + options.armijo_alpha * lambda * directional_term {
            return LineSearchOutcome { step_length: lambda, reductions: i, satisfied: true };
        }
        lambda *= options.backtrack_rho;
    }
    // keep the caller's cached residual in step with the returned point
    for ((t, xi), si) in trial.iter_mut().zip(x).zip(direction) {
        *t = xi + lambda * si;
    }
    merit(&trial);
    LineSearchOutcome { step_length: lambda, reductions: options.g_max, satisfied: false }
}

/// Builds a right preconditioner for the Newton system at a given iterate.
pub trait PreconditionerFactory: Sync {
    fn build(&self, x: &[f64], fx: &[f64]) -> Box<dyn LinearOperator>;
}

/// Runs the inexact Newton method with backtracking from `x0`.
pub fn inb_solve(system: &dyn NonlinearSystem, x0: &[f64], options: &SolverOptions) -> Result<SolveReport, SolveError> {
    NewtonLoop::new(system, options, Weighting::Unweighted).run(x0)
}

/// As [`inb_solve`] with a right preconditioner rebuilt at every iterate.
pub fn inb_solve_preconditioned(
    system: &dyn NonlinearSystem,
    x0: &[f64],
    options: &SolverOptions,
    preconditioner: &dyn PreconditionerFactory,
) -> Result<SolveReport, SolveError> {
    let mut run = NewtonLoop::new(system, options, Weighting::Unweighted);
    run.preconditioner = Some(preconditioner);
    run.run(x0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weighting {
    Unweighted,
    Adaptive,
}

/// Receives `(X^k, F(X^k))`.
pub(crate) type IterateObserver<'a> = &'a mut dyn FnMut(&[f64], &[f64]);

/// The Newton iteration shared by INB and ARDN.
pub(crate) struct NewtonLoop<'a> {
    system: &'a dyn NonlinearSystem,
    options: &'a SolverOptions,
    weighting: Weighting,
    /// Stop after this many steps even if `max_newton_iters` is larger.
    pub step_limit: Option<usize>,
    pub preconditioner: Option<&'a dyn PreconditionerFactory>,
    /// Called with `(X^k, F(X^k))` for every iterate, starting with `X^0`.
    pub observer: Option<IterateObserver<'a>>,
}

impl<'a> NewtonLoop<'a> {
    pub fn new(system: &'a dyn NonlinearSystem, options: &'a SolverOptions, weighting: Weighting) -> Self {
        Self { system, options, weighting, step_limit: None, preconditioner: None, observer: None }
    }

    fn label(&self) -> &'static str {
        match self.weighting {
            Weighting::Unweighted => "inb",
            Weighting::Adaptive => "ardn",
        }
    }

    pub fn run(mut self, x0: &[f64]) -> Result<SolveReport, SolveError> {
        let opts = self.options;
        opts.validate()?;
        let system = self.system;
        let n = system.dimension();
        if x0.len() != n {
            return Err(SolveError::DimensionMismatch { expected: n, actual: x0.len() });
        }
        let start = Instant::now();

        let mut x = x0.to_vec();
        let mut fx = system.eval(&x);
        if fx.iter().any(|v| !v.is_finite()) {
            return Err(SolveError::NonFiniteInitialResidual);
        }
        let norm0 = norm2(&fx);
        let beta = opts.beta.unwrap_or(0.1 * norm0);
        let limit = self.step_limit.map_or(opts.max_newton_iters, |l| l.min(opts.max_newton_iters));
        if let Some(obs) = self.observer.as_mut() {
            obs(&x, &fx);
        }

        let mut weights = match self.weighting {
            Weighting::Adaptive => Some(WeightVector::new(opts.initial_weight_vector(n))),
            Weighting::Unweighted => None,
        };
        let mut forcing: Option<ForcingState> = None;
        let mut previous: Option<(f64, usize)> = None; // (||F(X^{k-1})||, g^{k-1})
        let mut history: Vec<IterationRecord> = Vec::new();
        let mut trial_f = vec![0.0; n];
        let mut js = vec![0.0; n];

        let termination = loop {
            let k = history.len();
            let norm = norm2(&fx);
            if stopping_satisfied(norm, norm0, opts) {
                break Termination::Converged;
            }
            if k >= limit {
                break Termination::IterationLimit;
            }
            let eta = forcing_term(forcing.as_ref(), norm, beta, opts);

            if let (Some(w), Some((prev_norm, g_prev))) = (weights.as_mut(), previous) {
                if !opts.freeze_weights {
                    // X^1 is the first iterate with a previous step; its learning
                    // rate is pinned to alpha* by treating g^0 as g_max / 2.
                    let g_prev = if k == 1 { opts.g_max as f64 / 2.0 } else { g_prev as f64 };
                    let (d1, d2, alpha_k) = update_coefficients(norm / prev_norm, g_prev, opts);
                    update_weights(w, &fx, d1, d2, alpha_k);
                }
            }

            let lin = match Linearization::at(system, &x, &fx) {
                Ok(l) => l,
                Err(e) => {
                    log::warn!("{}: Jacobian failed at iteration {k}: {e}", self.label());
                    break Termination::NonFiniteResidual { iteration: k };
                }
            };
            let rhs: Vec<f64> = fx.iter().map(|v| -v).collect();
            let pc = self.preconditioner.map(|p| p.build(&x, &fx));
            let lin_out = gmres(&lin, &rhs, eta, opts.gmres_restart, opts.gmres_max_iters, pc.as_deref())?;
            let step = lin_out.solution;
            lin.apply(&step, &mut js);
            drop(lin);

            let model_norm = js.iter().zip(&fx).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
            let linear_check = opts.verify_linear_solves.then(|| model_norm / norm);

            let w = weights.as_ref().map(|w| w.as_slice());
            let merit_before = weighted_merit(w, &fx);
            let directional = weighted_directional_term(w, &fx, &js);
            let ls = armijo_backtracking(
                |trial: &[f64]| {
                    system.residual(trial, &mut trial_f);
                    weighted_merit(w, &trial_f)
                },
                &x,
                &step,
                merit_before,
                directional,
                opts,
            );
            if trial_f.iter().any(|v| !v.is_finite()) {
                log::warn!("{}: residual not finite along the step at iteration {k}", self.label());
                break Termination::NonFiniteResidual { iteration: k };
            }
            let merit_after = weighted_merit(w, &trial_f);

            for (xi, si) in x.iter_mut().zip(&step) {
                *xi += ls.step_length * si;
            }
            std::mem::swap(&mut fx, &mut trial_f);
            let new_norm = norm2(&fx);

            let (weight_min, weight_max) = match &weights {
                Some(w) => (Some(w.min()), Some(w.max())),
                None => (None, None),
            };
            let record = IterationRecord {
                k: k + 1,
                residual_norm: new_norm,
                step_length: ls.step_length,
                line_search_count: ls.reductions,
                forcing_term: eta,
                stagnant: is_stagnant(new_norm, norm, opts.stagnation_tau),
                line_search_satisfied: ls.satisfied,
                merit_before,
                merit_after,
                directional_term: directional,
                gmres_iterations: lin_out.iterations,
                gmres_relative_residual: lin_out.relative_residual,
                linear_residual_check: linear_check,
                weight_min,
                weight_max,
            };
            log::trace!(
                "{} k={} |F|={:.6e} lambda={:.3e} g={} eta={:.3e} gmres={}",
                self.label(),
                record.k,
                new_norm,
                ls.step_length,
                ls.reductions,
                eta,
                lin_out.iterations
            );
            history.push(record);

            forcing = Some(ForcingState { previous_residual_norm: norm, previous_linear_model_norm: model_norm });
            previous = Some((norm, ls.reductions));
            if let Some(obs) = self.observer.as_mut() {
                obs(&x, &fx);
            }
        };

        let elapsed = start.elapsed().as_secs_f64();
        log::debug!("{}: {:?} after {} iterations", self.label(), termination, history.len());
        Ok(SolveReport::new(self.label(), x, termination, elapsed, norm0, history))
    }
}
