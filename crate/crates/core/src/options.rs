//! Solver tunables shared by INB, ARDN and PIN^L.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Rule used to refresh the ARDN weight vector between Newton iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightStrategy {
    /// Gaussian-modulated decay and recognition factors with an adaptive learning rate.
    #[default]
    Full,
    /// Constant decay `delta` and constant learning rate `alpha*`.
    Simplified1,
    /// Constant decay `delta` and the adaptive learning rate.
    Simplified2,
}

impl FromStr for WeightStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Self::Full),
            "simplified1" => Ok(Self::Simplified1),
            "simplified2" => Ok(Self::Simplified2),
            other => Err(format!(
                "unknown weight strategy `{other}` (expected full | simplified1 | simplified2)"
            )),
        }
    }
}

impl fmt::Display for WeightStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Simplified1 => "simplified1",
            Self::Simplified2 => "simplified2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptionsError {
    #[error("`{name}` must be positive and finite, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("`{name}` must lie strictly inside (0, 1), got {value}")]
    OutsideUnitInterval { name: &'static str, value: f64 },
    #[error("`{name}` must be at least 1")]
    ZeroCount { name: &'static str },
    #[error("PCA sizes must satisfy 1 <= d <= s <= max_newton_iters (d = {components}, s = {training_size}, max = {max_iters})")]
    PcaSizes {
        components: usize,
        training_size: usize,
        max_iters: usize,
    },
    #[error("initial weights must be finite and non-negative")]
    BadWeights,
}

/// Every tunable of the three solvers.
///
/// Defaults reproduce the experimental setup used for the chemical
/// equilibrium and P1-P5 benchmarks, except `g_max`, which is per problem
/// (see [`crate::problems::BenchmarkSpec::options`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_newton_iters: usize,
    /// Forcing term used while the residual is above `beta`.
    pub eta0: f64,
    /// Residual-norm threshold for switching to the Eisenstat-Walker forcing
    /// term. `None` means `0.1 * ||F(X0)||`, computed when the solve starts.
    pub beta: Option<f64>,
    pub armijo_alpha: f64,
    pub backtrack_rho: f64,
    /// Maximum number of step-length reductions per line search.
    pub g_max: usize,
    /// `None` means all ones.
    pub initial_weights: Option<Vec<f64>>,
    /// Base decay rate `delta` of the weight multipliers.
    pub base_decay: f64,
    /// Initial learning rate `alpha*`.
    pub initial_learning_rate: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub stagnation_tau: f64,
    pub gmres_restart: usize,
    pub gmres_max_iters: usize,
    pub weight_strategy: WeightStrategy,
    /// Keep the ARDN weights at their initial value (diagnostics only).
    pub freeze_weights: bool,
    /// Recompute `||F'S + F|| / ||F||` after every linear solve and log it.
    pub verify_linear_solves: bool,
    pub pinl_training_size: usize,
    pub pinl_components: usize,
    pub pinl_subspace_rel_tol: f64,
    pub pinl_subspace_max_iters: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 1e-12,
            max_newton_iters: 200,
            eta0: 0.25,
            beta: None,
            armijo_alpha: 1e-4,
            backtrack_rho: 0.5,
            g_max: 12,
            initial_weights: None,
            base_decay: 0.5,
            initial_learning_rate: 0.24,
            sigma1: 0.3,
            sigma2: 0.25,
            stagnation_tau: 1e-6,
            gmres_restart: 50,
            gmres_max_iters: 1000,
            weight_strategy: WeightStrategy::Full,
            freeze_weights: false,
            verify_linear_solves: false,
            pinl_training_size: 8,
            pinl_components: 2,
            pinl_subspace_rel_tol: 1e-2,
            pinl_subspace_max_iters: 20,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<(), OptionsError> {
        let positive = [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("armijo_alpha", self.armijo_alpha),
            ("initial_learning_rate", self.initial_learning_rate),
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
            ("stagnation_tau", self.stagnation_tau),
            ("pinl_subspace_rel_tol", self.pinl_subspace_rel_tol),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(OptionsError::NotPositive { name, value });
            }
        }
        if let Some(beta) = self.beta {
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(OptionsError::NotPositive { name: "beta", value: beta });
            }
        }
        let unit = [
            ("eta0", self.eta0),
            ("backtrack_rho", self.backtrack_rho),
            ("base_decay", self.base_decay),
        ];
        for (name, value) in unit {
            if !(value > 0.0 && value < 1.0) {
                return Err(OptionsError::OutsideUnitInterval { name, value });
            }
        }
        let counts = [
            ("g_max", self.g_max),
            ("max_newton_iters", self.max_newton_iters),
            ("gmres_restart", self.gmres_restart),
            ("gmres_max_iters", self.gmres_max_iters),
            ("pinl_subspace_max_iters", self.pinl_subspace_max_iters),
        ];
        for (name, value) in counts {
            if value == 0 {
                return Err(OptionsError::ZeroCount { name });
            }
        }
        let (d, s) = (self.pinl_components, self.pinl_training_size);
        if d == 0 || d > s || s > self.max_newton_iters {
            return Err(OptionsError::PcaSizes {
                components: d,
                training_size: s,
                max_iters: self.max_newton_iters,
            });
        }
        if let Some(w) = &self.initial_weights {
            if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(OptionsError::BadWeights);
            }
        }
        Ok(())
    }

    /// Initial weight vector of length `n`.
    pub fn initial_weight_vector(&self, n: usize) -> Vec<f64> {
        match &self.initial_weights {
            Some(w) if w.len() == n => w.clone(),
            Some(w) if w.len() == 1 => vec![w[0]; n],
            _ => vec![1.0; n],
        }
    }
}
