use crate::error::SolveError;
use crate::system::{JacobianProvider, NonlinearSystem};

fn sigmoid(t: f64) -> f64 {
    1.0 / (1.0 + (-t).exp())
}

/// P1: alternating sigmoid and Rosenbrock-coupling equations. `n` must be even.
#[derive(Debug, Clone, Copy)]
pub struct ModifiedRosenbrock {
    n: usize,
}

impl ModifiedRosenbrock {
    pub fn new(n: usize) -> Result<Self, SolveError> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(SolveError::Problem(format!("modified Rosenbrock needs a positive even n, got {n}")));
        }
        Ok(Self { n })
    }

    /// `-1.8` at odd (1-based) positions, `-1` at even ones.
    pub fn initial_guess(&self) -> Vec<f64> {
        (0..self.n).map(|i| if i % 2 == 0 { -1.8 } else { -1.0 }).collect()
    }

    pub fn solution(&self) -> Vec<f64> {
        let odd = (0.73f64 / 0.27).ln();
        (0..self.n).map(|i| if i % 2 == 0 { odd } else { odd * odd }).collect()
    }
}

impl NonlinearSystem for ModifiedRosenbrock {
    fn dimension(&self) -> usize {
        self.n
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = if i % 2 == 0 {
                sigmoid(x[i]) - 0.73
            } else {
                10.0 * (x[i] - x[i - 1] * x[i - 1])
            };
        }
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        JacobianProvider::AnalyticProduct
    }

    fn analytic_jacobian_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        for i in 0..self.n {
            out[i] = if i % 2 == 0 {
                let s = sigmoid(x[i]);
                s * (1.0 - s) * v[i]
            } else {
                10.0 * (v[i] - 2.0 * x[i - 1] * v[i - 1])
            };
        }
        true
    }
}

/// P2: four-periodic augmented Rosenbrock. `n` must be a multiple of 4.
#[derive(Debug, Clone, Copy)]
pub struct AugmentedRosenbrock {
    n: usize,
}

impl AugmentedRosenbrock {
    pub fn new(n: usize) -> Result<Self, SolveError> {
        if n == 0 || !n.is_multiple_of(4) {
            return Err(SolveError::Problem(format!("augmented Rosenbrock needs n divisible by 4, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn initial_guess(&self) -> Vec<f64> {
        const BLOCK: [f64; 4] = [-1.2, 1.0, -1.0, 20.0];
        (0..self.n).map(|i| BLOCK[i % 4]).collect()
    }
}

impl NonlinearSystem for AugmentedRosenbrock {
    fn dimension(&self) -> usize {
        self.n
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = match i % 4 {
                0 => 10.0 * (x[i + 1] - x[i] * x[i]),
                1 => 1.0 - x[i - 1],
                2 => 1.25 * x[i] - 0.25 * x[i].powi(3),
                _ => x[i],
            };
        }
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        JacobianProvider::AnalyticProduct
    }

    fn analytic_jacobian_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        for i in 0..self.n {
            out[i] = match i % 4 {
                0 => 10.0 * (v[i + 1] - 2.0 * x[i] * v[i]),
                1 => -v[i - 1],
                2 => (1.25 - 0.75 * x[i] * x[i]) * v[i],
                _ => v[i],
            };
        }
        true
    }
}
