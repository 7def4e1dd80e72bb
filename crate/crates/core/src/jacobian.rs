//! Jacobian providers: finite differences, Jacobian-vector products, and the
//! linearized operator handed to GMRES.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{norm2, LinearOperator};
use crate::system::{JacobianProvider, NonlinearSystem};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JacobianError {
    #[error("residual is not finite at the finite-difference probe for column {column}")]
    NonFiniteColumn { column: usize },
    #[error("residual is not finite at the directional finite-difference probe")]
    NonFiniteProbe,
}

fn sqrt_eps() -> f64 {
    f64::EPSILON.sqrt()
}

/// Forward-difference Jacobian with steps `h_j = sqrt(eps) * max(|x_j|, 1)`.
pub fn finite_difference_jacobian(
    system: &dyn NonlinearSystem,
    x: &[f64],
) -> Result<DMatrix<f64>, JacobianError> {
    let fx = system.eval(x);
    finite_difference_jacobian_at(system, x, &fx)
}

/// As [`finite_difference_jacobian`], reusing an already computed `F(x)`.
pub fn finite_difference_jacobian_at(
    system: &dyn NonlinearSystem,
    x: &[f64],
    fx: &[f64],
) -> Result<DMatrix<f64>, JacobianError> {
    let n = system.dimension();
    let mut jac = DMatrix::zeros(n, n);
    let mut probe = x.to_vec();
    let mut fp = vec![0.0; n];
    for j in 0..n {
        let h = sqrt_eps() * x[j].abs().max(1.0);
        probe[j] = x[j] + h;
        // the step actually taken, after rounding
        let h_eff = probe[j] - x[j];
        system.residual(&probe, &mut fp);
        probe[j] = x[j];
        if fp.iter().any(|v| !v.is_finite()) {
            return Err(JacobianError::NonFiniteColumn { column: j });
        }
        for i in 0..n {
            jac[(i, j)] = (fp[i] - fx[i]) / h_eff;
        }
    }
    Ok(jac)
}

/// `F'(x) v`: exact when the system provides an analytic derivative,
/// otherwise a directional forward difference with step
/// `h = sqrt(eps) * (1 + ||x||) / ||v||`.
pub fn jacobian_vector_product(
    system: &dyn NonlinearSystem,
    x: &[f64],
    v: &[f64],
    fx: &[f64],
) -> Result<Vec<f64>, JacobianError> {
    let n = system.dimension();
    let mut out = vec![0.0; n];
    let v_norm = norm2(v);
    if v_norm == 0.0 {
        return Ok(out);
    }
    if system.jacobian_provider() != JacobianProvider::FiniteDifference
        && system.analytic_jacobian_product(x, v, &mut out)
    {
        return Ok(out);
    }
    directional_difference(system, x, v, fx, &mut out)?;
    Ok(out)
}

fn directional_difference(
    system: &dyn NonlinearSystem,
    x: &[f64],
    v: &[f64],
    fx: &[f64],
    out: &mut [f64],
) -> Result<(), JacobianError> {
    let h = sqrt_eps() * (1.0 + norm2(x)) / norm2(v);
    let probe: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi + h * vi).collect();
    system.residual(&probe, out);
    if out.iter().any(|o| !o.is_finite()) {
        return Err(JacobianError::NonFiniteProbe);
    }
    for (o, f) in out.iter_mut().zip(fx) {
        *o = (*o - f) / h;
    }
    Ok(())
}

/// `F'(X^k)` as a linear operator for one Newton iteration.
pub enum Linearization<'a> {
    /// Assembled matrix (analytic or finite-difference).
    Dense(DMatrix<f64>),
    /// Matrix-free analytic product.
    Product {
        system: &'a dyn NonlinearSystem,
        x: &'a [f64],
    },
}

impl<'a> Linearization<'a> {
    /// Builds the operator the system's provider calls for.
    pub fn at(system: &'a dyn NonlinearSystem, x: &'a [f64], fx: &[f64]) -> Result<Self, JacobianError> {
        match system.jacobian_provider() {
            JacobianProvider::AnalyticMatrix => match system.analytic_jacobian(x) {
                Some(j) => Ok(Self::Dense(j)),
                None => finite_difference_jacobian_at(system, x, fx).map(Self::Dense),
            },
            JacobianProvider::AnalyticProduct => Ok(Self::Product { system, x }),
            JacobianProvider::FiniteDifference => finite_difference_jacobian_at(system, x, fx).map(Self::Dense),
        }
    }
}

impl LinearOperator for Linearization<'_> {
    fn dimension(&self) -> usize {
        match self {
            Self::Dense(m) => m.nrows(),
            Self::Product { system, .. } => system.dimension(),
        }
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        match self {
            Self::Dense(m) => m.apply(v, out),
            Self::Product { system, x } => {
                let ok = system.analytic_jacobian_product(x, v, out);
                debug_assert!(ok, "system advertised an analytic product it does not provide");
            }
        }
    }
}
