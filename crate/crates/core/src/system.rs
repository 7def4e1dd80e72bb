//! Nonlinear systems `F(X) = 0` and the ways their Jacobians are provided.

use nalgebra::DMatrix;

/// How a solver should obtain `F'(X)` for a given system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianProvider {
    /// The system assembles the full dense Jacobian.
    AnalyticMatrix,
    /// The system applies `F'(X)` to a vector without assembling it.
    AnalyticProduct,
    /// Forward differences of the residual.
    FiniteDifference,
}

/// A square nonlinear system `F: R^n -> R^n`.
///
/// Implementations must be re-entrant: evaluating the residual never mutates
/// shared state, so independent solves may run on separate threads.
pub trait NonlinearSystem: Send + Sync {
    fn dimension(&self) -> usize;

    /// Writes `F(x)` into `out`. Both slices have length [`dimension`](Self::dimension).
    fn residual(&self, x: &[f64], out: &mut [f64]);

    fn jacobian_provider(&self) -> JacobianProvider {
        JacobianProvider::FiniteDifference
    }

    /// Dense analytic Jacobian, when the system has one.
    fn analytic_jacobian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Analytic `F'(x) v` written into `out`. Returns `false` when the system
    /// has no analytic derivative.
    fn analytic_jacobian_product(&self, x: &[f64], v: &[f64], out: &mut [f64]) -> bool {
        match self.analytic_jacobian(x) {
            Some(jac) => {
                let prod = &jac * nalgebra::DVector::from_column_slice(v);
                out.copy_from_slice(prod.as_slice());
                true
            }
            None => false,
        }
    }

    /// Convenience wrapper allocating the residual vector.
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        self.residual(x, &mut out);
        out
    }
}

type ResidualFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
type JacobianFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;

/// A system assembled from closures. Handy for tests and small ad-hoc problems.
pub struct FnSystem {
    dimension: usize,
    residual: Box<ResidualFn>,
    jacobian: Option<Box<JacobianFn>>,
}

impl FnSystem {
    pub fn new<F>(dimension: usize, residual: F) -> Self
    where
        F: Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    {
        Self {
            dimension,
            residual: Box::new(residual),
            jacobian: None,
        }
    }

    pub fn with_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Box::new(jacobian));
        self
    }

    /// `F(x) = A x - b`, with its exact Jacobian.
    pub fn affine(a: DMatrix<f64>, b: Vec<f64>) -> Self {
        assert_eq!(a.nrows(), a.ncols(), "affine system needs a square matrix");
        assert_eq!(a.nrows(), b.len());
        let n = b.len();
        let a_res = a.clone();
        Self::new(n, move |x, out| {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += a_res[(i, j)] * x[j];
                }
                out[i] = acc - b[i];
            }
        })
        .with_jacobian(move |_| a.clone())
    }
}

impl std::fmt::Debug for FnSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FnSystem")
            .field("dimension", &self.dimension)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .finish()
    }
}

impl NonlinearSystem for FnSystem {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        (self.residual)(x, out)
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        if self.jacobian.is_some() {
            JacobianProvider::AnalyticMatrix
        } else {
            JacobianProvider::FiniteDifference
        }
    }

    fn analytic_jacobian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        self.jacobian.as_ref().map(|j| j(x))
    }
}
