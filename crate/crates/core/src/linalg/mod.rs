//! Dense and Krylov linear algebra used by the Newton solvers.

mod dense;
mod gmres;
mod pca;

pub use dense::dense_solve;
pub use gmres::{gmres, GmresOutcome};
pub use pca::{truncated_left_singular_vectors, ProjectorPair};

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix is numerically singular (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("data matrix has numerical rank {rank}, fewer than the {requested} requested components")]
    RankDeficient { rank: usize, requested: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

/// A linear map `v -> A v` on `R^n`.
pub trait LinearOperator {
    fn dimension(&self) -> usize;
    fn apply(&self, v: &[f64], out: &mut [f64]);
}

impl LinearOperator for DMatrix<f64> {
    fn dimension(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        // column-major storage: accumulate column by column
        for (j, col) in self.column_iter().enumerate() {
            let vj = v[j];
            if vj != 0.0 {
                for (o, a) in out.iter_mut().zip(col.iter()) {
                    *o += a * vj;
                }
            }
        }
    }
}

/// Operator backed by a closure.
pub struct FnOperator<F> {
    dimension: usize,
    apply: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dimension: usize, apply: F) -> Self {
        Self { dimension, apply }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        (self.apply)(v, out)
    }
}

/// Identity on `R^n`.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn dimension(&self) -> usize {
        self.0
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        out.copy_from_slice(v);
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
