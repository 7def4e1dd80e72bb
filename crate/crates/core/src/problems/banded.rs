use crate::error::SolveError;
use crate::system::{JacobianProvider, NonlinearSystem};

/// P3: tridiagonal system with root `(1, ..., 1)`.
#[derive(Debug, Clone, Copy)]
pub struct Tridiagonal {
    n: usize,
}

impl Tridiagonal {
    pub fn new(n: usize) -> Result<Self, SolveError> {
        if n < 3 {
            return Err(SolveError::Problem(format!("tridiagonal problem needs n >= 3, got {n}")));
        }
        Ok(Self { n })
    }
}

impl NonlinearSystem for Tridiagonal {
    fn dimension(&self) -> usize {
        self.n
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        out[0] = 4.0 * (x[0] - x[1] * x[1]);
        for k in 1..n {
            let mut r = 8.0 * x[k] * (x[k] * x[k] - x[k - 1]) - 2.0 * (1.0 - x[k]);
            if k < n - 1 {
                r += 4.0 * (x[k] - x[k + 1] * x[k + 1]);
            }
            out[k] = r;
        }
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        JacobianProvider::AnalyticProduct
    }

    fn analytic_jacobian_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        let n = self.n;
        out[0] = 4.0 * (v[0] - 2.0 * x[1] * v[1]);
        for k in 1..n {
            let mut diag = 24.0 * x[k] * x[k] - 8.0 * x[k - 1] + 2.0;
            let mut r = -8.0 * x[k] * v[k - 1];
            if k < n - 1 {
                diag += 4.0;
                r -= 8.0 * x[k + 1] * v[k + 1];
            }
            out[k] = r + diag * v[k];
        }
        true
    }
}

/// P4: five-diagonal system with root `(1, ..., 1)`.
///
/// Interior rows carry the forward pair `x_{k+1} - x_{k+2}^2`, matching the
/// first row and the five-band structure.
#[derive(Debug, Clone, Copy)]
pub struct FiveDiagonal {
    n: usize,
}

impl FiveDiagonal {
    pub fn new(n: usize) -> Result<Self, SolveError> {
        if n < 5 {
            return Err(SolveError::Problem(format!("five-diagonal problem needs n >= 5, got {n}")));
        }
        Ok(Self { n })
    }
}

/// `8 x_k (x_k^2 - x_{k-1}) - 2 (1 - x_k)`
fn cubic_core(x: &[f64], k: usize) -> f64 {
    8.0 * x[k] * (x[k] * x[k] - x[k - 1]) - 2.0 * (1.0 - x[k])
}

impl NonlinearSystem for FiveDiagonal {
    fn dimension(&self) -> usize {
        self.n
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n;
        let sq = |i: usize| x[i] * x[i];
        out[0] = 4.0 * (x[0] - sq(1)) + x[1] - sq(2);
        out[1] = cubic_core(x, 1) + 4.0 * (x[1] - sq(2)) + x[2] - sq(3);
        for k in 2..n - 2 {
            out[k] = cubic_core(x, k) + 4.0 * (x[k] - sq(k + 1)) + sq(k - 1) - x[k - 2] + x[k + 1] - sq(k + 2);
        }
        out[n - 2] = cubic_core(x, n - 2) + 4.0 * (x[n - 2] - sq(n - 1)) + sq(n - 3) - x[n - 4];
        out[n - 1] = cubic_core(x, n - 1) + sq(n - 2) - x[n - 3];
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        JacobianProvider::AnalyticProduct
    }

    fn analytic_jacobian_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        let n = self.n;
        // d/dx of cubic_core(k): diagonal and sub-diagonal parts.
        let core = |k: usize| (24.0 * x[k] * x[k] - 8.0 * x[k - 1] + 2.0) * v[k] - 8.0 * x[k] * v[k - 1];
        out[0] = 4.0 * v[0] + (1.0 - 8.0 * x[1]) * v[1] - 2.0 * x[2] * v[2];
        out[1] = core(1) + 4.0 * v[1] + (1.0 - 8.0 * x[2]) * v[2] - 2.0 * x[3] * v[3];
        for k in 2..n - 2 {
            out[k] = core(k) + 4.0 * v[k] + (1.0 - 8.0 * x[k + 1]) * v[k + 1] + 2.0 * x[k - 1] * v[k - 1]
                - v[k - 2]
                - 2.0 * x[k + 2] * v[k + 2];
        }
        let k = n - 2;
        out[k] = core(k) + 4.0 * v[k] - 8.0 * x[k + 1] * v[k + 1] + 2.0 * x[k - 1] * v[k - 1] - v[k - 2];
        let k = n - 1;
        out[k] = core(k) + 2.0 * x[k - 1] * v[k - 1] - v[k - 2];
        true
    }
}
