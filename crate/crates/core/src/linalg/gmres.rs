//! Restarted GMRES with modified Gram-Schmidt and selective reorthogonalization.

use super::{axpy, dot, norm2, LinalgError, LinearOperator};

/// Orthogonality loss that triggers a second Gram-Schmidt pass.
const REORTH_TOL: f64 = 1e-8;
/// Relative size of the new Krylov vector at which Arnoldi is considered broken down.
const BREAKDOWN_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub solution: Vec<f64>,
    /// `||b - A x|| / ||b||` of the returned iterate.
    pub relative_residual: f64,
    /// Total Arnoldi steps (matrix-vector products, excluding residual refreshes).
    pub iterations: usize,
    pub converged: bool,
    /// Arnoldi broke down before reaching the tolerance.
    pub breakdown: bool,
    /// Relative residual estimates after every Arnoldi step.
    pub residual_history: Vec<f64>,
}

/// Solves `A x = b` with restarted GMRES from a zero initial guess.
///
/// `preconditioner`, when given, applies `M^{-1}` on the right, so the
/// reported residual is always that of the original system.
pub fn gmres(
    op: &dyn LinearOperator,
    rhs: &[f64],
    rel_tol: f64,
    restart: usize,
    max_iters: usize,
    preconditioner: Option<&dyn LinearOperator>,
) -> Result<GmresOutcome, LinalgError> {
    let n = op.dimension();
    if rhs.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, actual: rhs.len() });
    }
    if let Some(pc) = preconditioner {
        if pc.dimension() != n {
            return Err(LinalgError::DimensionMismatch { expected: n, actual: pc.dimension() });
        }
    }
    if restart == 0 || max_iters == 0 {
        return Err(LinalgError::InvalidArgument("restart and max_iters must be positive"));
    }

    let mut x = vec![0.0; n];
    let b_norm = norm2(rhs);
    if b_norm == 0.0 {
        return Ok(GmresOutcome {
            solution: x,
            relative_residual: 0.0,
            iterations: 0,
            converged: true,
            breakdown: false,
            residual_history: Vec::new(),
        });
    }
    let target = rel_tol * b_norm;
    let m = restart.min(n).max(1);

    let mut r = rhs.to_vec();
    let mut r_norm = b_norm;
    let mut total = 0;
    let mut history = Vec::new();
    let mut w = vec![0.0; n];
    let mut z = vec![0.0; n];

    loop {
        if r_norm <= target || total >= max_iters {
            return Ok(GmresOutcome {
                solution: x,
                relative_residual: r_norm / b_norm,
                iterations: total,
                converged: r_norm <= target,
                breakdown: false,
                residual_history: history,
            });
        }

        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|v| v / r_norm).collect());
        // Hessenberg columns, already rotated into upper-triangular form.
        let mut hess: Vec<Vec<f64>> = Vec::with_capacity(m);
        let mut cs: Vec<f64> = Vec::with_capacity(m);
        let mut sn: Vec<f64> = Vec::with_capacity(m);
        let mut g = vec![0.0; m + 1];
        g[0] = r_norm;
        let mut breakdown = false;

        for j in 0..m {
            total += 1;
            apply_preconditioned(op, preconditioner, &basis[j], &mut z, &mut w);
            let w_before = norm2(&w);

            let mut h = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                h[i] = hij;
                axpy(-hij, v, &mut w);
            }
            let mut w_norm = norm2(&w);
            if w_norm > 0.0 {
                let loss = basis.iter().fold(0.0f64, |acc, v| acc.max(dot(&w, v).abs())) / w_norm;
                if loss > REORTH_TOL {
                    for (i, v) in basis.iter().enumerate() {
                        let c = dot(&w, v);
                        h[i] += c;
                        axpy(-c, v, &mut w);
                    }
                    w_norm = norm2(&w);
                }
            }
            h[j + 1] = w_norm;

            for i in 0..j {
                let t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            let (c, s) = givens(h[j], h[j + 1]);
            h[j] = c * h[j] + s * h[j + 1];
            h[j + 1] = 0.0;
            g[j + 1] = -s * g[j];
            g[j] *= c;
            cs.push(c);
            sn.push(s);
            hess.push(h);

            let estimate = g[j + 1].abs();
            history.push(estimate / b_norm);
            breakdown = w_norm <= BREAKDOWN_TOL * w_before.max(f64::MIN_POSITIVE);
            if estimate <= target || breakdown || total >= max_iters {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }

        let y = back_substitute(&hess, &g);
        let mut update = vec![0.0; n];
        for (yi, v) in y.iter().zip(&basis) {
            axpy(*yi, v, &mut update);
        }
        match preconditioner {
            Some(pc) => {
                pc.apply(&update, &mut z);
                axpy(1.0, &z, &mut x);
            }
            None => axpy(1.0, &update, &mut x),
        }

        op.apply(&x, &mut w);
        for ((ri, bi), wi) in r.iter_mut().zip(rhs).zip(&w) {
            *ri = bi - wi;
        }
        r_norm = norm2(&r);

        if breakdown && r_norm > target {
            return Ok(GmresOutcome {
                solution: x,
                relative_residual: r_norm / b_norm,
                iterations: total,
                converged: false,
                breakdown: true,
                residual_history: history,
            });
        }
    }
}

fn apply_preconditioned(
    op: &dyn LinearOperator,
    preconditioner: Option<&dyn LinearOperator>,
    v: &[f64],
    scratch: &mut [f64],
    out: &mut [f64],
) {
    match preconditioner {
        Some(pc) => {
            pc.apply(v, scratch);
            op.apply(scratch, out);
        }
        None => op.apply(v, out),
    }
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else {
        let r = a.hypot(b);
        (a / r, b / r)
    }
}

/// Solves the rotated triangular system, dropping trailing columns whose
/// diagonal vanished (singular operator restricted to the Krylov space).
fn back_substitute(hess: &[Vec<f64>], g: &[f64]) -> Vec<f64> {
    let scale = hess.iter().map(|c| c[c.len() - 2].abs()).fold(0.0, f64::max);
    let k = hess
        .iter()
        .position(|c| c[c.len() - 2].abs() <= 1e-300_f64.max(1e-16 * scale))
        .unwrap_or(hess.len());
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = g[i];
        for j in i + 1..k {
            acc -= hess[j][i] * y[j];
        }
        y[i] = acc / hess[i][i];
    }
    y
}
