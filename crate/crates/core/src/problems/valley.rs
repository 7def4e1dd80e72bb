use crate::error::SolveError;
use crate::system::{JacobianProvider, NonlinearSystem};

const C1: f64 = 1.003344481605351;
const C2: f64 = -3.344481605351171e-3;

/// P5: tridimensional valley, three-periodic. `n` must be a multiple of 3.
#[derive(Debug, Clone, Copy)]
pub struct TridimensionalValley {
    n: usize,
}

impl TridimensionalValley {
    pub fn new(n: usize) -> Result<Self, SolveError> {
        if n == 0 || !n.is_multiple_of(3) {
            return Err(SolveError::Problem(format!("tridimensional valley needs n divisible by 3, got {n}")));
        }
        Ok(Self { n })
    }

    pub fn initial_guess(&self) -> Vec<f64> {
        const BLOCK: [f64; 3] = [-4.0, 1.0, 2.0];
        (0..self.n).map(|i| BLOCK[i % 3]).collect()
    }
}

impl NonlinearSystem for TridimensionalValley {
    fn dimension(&self) -> usize {
        self.n
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = match i % 3 {
                0 => (C2 * x[i].powi(3) + C1 * x[i]) * (-x[i] * x[i] / 100.0).exp() - 1.0,
                1 => 10.0 * (x[i - 1].sin() - x[i]),
                _ => 10.0 * (x[i - 2].cos() - x[i]),
            };
        }
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        JacobianProvider::AnalyticProduct
    }

    fn analytic_jacobian_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        for i in 0..self.n {
            out[i] = match i % 3 {
                0 => {
                    let t = x[i];
                    let e = (-t * t / 100.0).exp();
                    let poly = C2 * t.powi(3) + C1 * t;
                    ((3.0 * C2 * t * t + C1) - poly * t / 50.0) * e * v[i]
                }
                1 => 10.0 * (x[i - 1].cos() * v[i - 1] - v[i]),
                _ => -10.0 * (x[i - 2].sin() * v[i - 2] + v[i]),
            };
        }
        true
    }
}
