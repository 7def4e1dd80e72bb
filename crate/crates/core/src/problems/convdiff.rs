use crate::error::SolveError;
use crate::system::{JacobianProvider, NonlinearSystem};

/// `phi(x) = 10 x (1 - x) exp(x^4.5)` with its first two derivatives.
fn phi(x: f64) -> (f64, f64, f64) {
    let a = 10.0 * x - 10.0 * x * x;
    let da = 10.0 - 20.0 * x;
    let dda = -20.0;
    let b = x.powf(4.5).exp();
    let p = 4.5 * x.powf(3.5);
    let db = p * b;
    let ddb = (15.75 * x.powf(2.5) + p * p) * b;
    (a * b, da * b + a * db, dda * b + 2.0 * da * db + a * ddb)
}

/// `psi(y) = y (1 - y)` with its first two derivatives.
fn psi(y: f64) -> (f64, f64, f64) {
    (y * (1.0 - y), 1.0 - 2.0 * y, -2.0)
}

/// Manufactured solution `u(x, y) = phi(x) psi(y)`.
pub fn exact_solution(x: f64, y: f64) -> f64 {
    phi(x).0 * psi(y).0
}

/// Source term making [`exact_solution`] solve `Δu + C u (u_x + u_y) = g`.
pub fn source(c: f64, x: f64, y: f64) -> f64 {
    let (f, df, ddf) = phi(x);
    let (g, dg, ddg) = psi(y);
    ddf * g + f * ddg + c * f * g * (df * g + f * dg)
}

/// Central-difference discretization of `Δu + C u (u_x + u_y) = g` on the
/// unit square with zero Dirichlet data. Unknown `(i, j)` (1-based interior
/// node at `x = i h`, `y = j h`) is stored at `(j - 1) N + (i - 1)`.
#[derive(Debug, Clone)]
pub struct ConvectionDiffusion {
    c: f64,
    grid_n: usize,
    h: f64,
    rhs: Vec<f64>,
}

impl ConvectionDiffusion {
    pub fn new(c: f64, grid_n: usize) -> Result<Self, SolveError> {
        if grid_n < 3 {
            return Err(SolveError::Problem(format!("convection-diffusion needs at least 3 interior points per direction, got {grid_n}")));
        }
        if !c.is_finite() {
            return Err(SolveError::Problem(format!("convection coefficient must be finite, got {c}")));
        }
        let h = 1.0 / (grid_n as f64 + 1.0);
        let mut rhs = Vec::with_capacity(grid_n * grid_n);
        for j in 1..=grid_n {
            for i in 1..=grid_n {
                rhs.push(source(c, i as f64 * h, j as f64 * h));
            }
        }
        Ok(Self { c, grid_n, h, rhs })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn mesh_width(&self) -> f64 {
        self.h
    }

    pub fn convection(&self) -> f64 {
        self.c
    }

    /// The manufactured solution sampled at the interior nodes.
    pub fn exact_samples(&self) -> Vec<f64> {
        let n = self.grid_n;
        let mut u = Vec::with_capacity(n * n);
        for j in 1..=n {
            for i in 1..=n {
                u.push(exact_solution(i as f64 * self.h, j as f64 * self.h));
            }
        }
        u
    }

    /// Calls `f(idx, centre, east, west, north, south)` for every node, with
    /// boundary neighbours read as zero.
    fn stencil(&self, u: &[f64], mut f: impl FnMut(usize, f64, f64, f64, f64, f64)) {
        let n = self.grid_n;
        for j in 0..n {
            for i in 0..n {
                let idx = j * n + i;
                let e = if i + 1 < n { u[idx + 1] } else { 0.0 };
                let w = if i > 0 { u[idx - 1] } else { 0.0 };
                let no = if j + 1 < n { u[idx + n] } else { 0.0 };
                let s = if j > 0 { u[idx - n] } else { 0.0 };
                f(idx, u[idx], e, w, no, s);
            }
        }
    }
}

impl NonlinearSystem for ConvectionDiffusion {
    fn dimension(&self) -> usize {
        self.grid_n * self.grid_n
    }

    fn residual(&self, u: &[f64], out: &mut [f64]) {
        let inv_h2 = 1.0 / (self.h * self.h);
        let inv_2h = 0.5 / self.h;
        self.stencil(u, |idx, c, e, w, no, s| {
            let lap = (e + w + no + s - 4.0 * c) * inv_h2;
            let grad = (e - w + no - s) * inv_2h;
            out[idx] = lap + self.c * c * grad - self.rhs[idx];
        });
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        JacobianProvider::AnalyticProduct
    }

    fn analytic_jacobian_product(&self, u: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        let inv_h2 = 1.0 / (self.h * self.h);
        let inv_2h = 0.5 / self.h;
        self.stencil(v, |idx, c, e, w, no, s| {
            out[idx] = (e + w + no + s - 4.0 * c) * inv_h2 + self.c * u[idx] * (e - w + no - s) * inv_2h;
        });
        self.stencil(u, |idx, _, e, w, no, s| {
            out[idx] += self.c * v[idx] * (e - w + no - s) * inv_2h;
        });
        true
    }
}
