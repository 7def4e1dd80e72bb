//! Adaptive residual-driven Newton (ARDN).
//!
//! Each residual component carries a weight multiplier. The line search runs
//! on the weighted merit `1/2 ||w ⊙ F||^2`, so components that dominate the
//! residual get a larger say in the step length instead of stalling the
//! others. Weights are refreshed before every linear solve from the current
//! residual, the progress ratio `||F_k|| / ||F_{k-1}||`, and the number of
//! step reductions the previous line search needed.

use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::inb::{NewtonLoop, Weighting};
use crate::linalg::norm_inf;
use crate::options::{SolverOptions, WeightStrategy};
use crate::report::SolveReport;
use crate::system::NonlinearSystem;

/// Per-component weight multipliers, all non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Self {
        debug_assert!(weights.iter().all(|w| *w >= 0.0));
        Self(weights)
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

fn gaussian(t: f64, sigma: f64) -> f64 {
    (-(t - 1.0).powi(2) / (2.0 * sigma * sigma)).exp()
}

/// Weight decay factor `delta * psi1(ratio)` and recognition factor
/// `1 - psi2(ratio)`, where `psi_i` are unit-peak Gaussians centred at 1.
pub fn decay_factors(ratio: f64, options: &SolverOptions) -> (f64, f64) {
    let delta1 = options.base_decay * gaussian(ratio, options.sigma1);
    let delta2 = 1.0 - gaussian(ratio, options.sigma2);
    (delta1, delta2)
}

/// `alpha* * 2 g_prev / g_max`.
pub fn learning_rate(g_prev: f64, options: &SolverOptions) -> f64 {
    options.initial_learning_rate * (2.0 * g_prev / options.g_max as f64)
}

/// `(delta1, delta2, alpha_k)` for the configured strategy.
///
/// The simplified strategies are the full rule with `delta2 = 0` and a
/// constant decay `delta`; they differ only in the learning rate.
pub fn update_coefficients(ratio: f64, g_prev: f64, options: &SolverOptions) -> (f64, f64, f64) {
    match options.weight_strategy {
        WeightStrategy::Full => {
            let (d1, d2) = decay_factors(ratio, options);
            (d1, d2, learning_rate(g_prev, options))
        }
        WeightStrategy::Simplified1 => (options.base_decay, 0.0, options.initial_learning_rate),
        WeightStrategy::Simplified2 => (options.base_decay, 0.0, learning_rate(g_prev, options)),
    }
}

/// `w_i <- delta1 w_i + alpha_k (|e_i| / |e|_max + delta2 (|e|_max - |e_i|) / |e|_max)`.
///
/// A zero residual leaves the weights untouched.
pub fn update_weights(weights: &mut WeightVector, residual: &[f64], delta1: f64, delta2: f64, alpha_k: f64) {
    let e_max = norm_inf(residual);
    if e_max == 0.0 || !e_max.is_finite() {
        return;
    }
    for (w, e) in weights.0.iter_mut().zip(residual) {
        let share = e.abs() / e_max;
        let bracket = share + delta2 * (e_max - e.abs()) / e_max;
        *w = delta1 * *w + alpha_k * bracket;
    }
}

/// `1/2 sum (w_i F_i)^2`; unweighted when `weights` is `None`.
pub fn weighted_merit(weights: Option<&[f64]>, fx: &[f64]) -> f64 {
    let sum: f64 = match weights {
        Some(w) => w.iter().zip(fx).map(|(wi, fi)| (wi * fi) * (wi * fi)).sum(),
        None => fx.iter().map(|fi| fi * fi).sum(),
    };
    0.5 * sum
}

/// `(w ⊙ w ⊙ F)^T (F' S)`: the merit's directional derivative along `S`,
/// given `js = F'(X) S`.
pub fn weighted_directional_term(weights: Option<&[f64]>, fx: &[f64], js: &[f64]) -> f64 {
    match weights {
        Some(w) => w
            .iter()
            .zip(fx)
            .zip(js)
            .map(|((wi, fi), ji)| (wi * (wi * fi)) * ji)
            .sum(),
        None => fx.iter().zip(js).map(|(fi, ji)| fi * ji).sum(),
    }
}

/// Upper bound `w_i^init + 2 alpha* / (1 - delta)` on every weight produced by
/// the full strategy.
pub fn weight_upper_bound(initial: f64, options: &SolverOptions) -> f64 {
    initial + 2.0 * options.initial_learning_rate / (1.0 - options.base_decay)
}

/// Runs the adaptive residual-driven Newton solver from `x0`.
///
/// The stopping and stagnation tests use the unweighted residual norm.
pub fn ardn_solve(system: &dyn NonlinearSystem, x0: &[f64], options: &SolverOptions) -> Result<SolveReport, SolveError> {
    NewtonLoop::new(system, options, Weighting::Adaptive).run(x0)
}
