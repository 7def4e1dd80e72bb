//! Truncated left singular vectors and the PCA projector pair.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{axpy, dot, norm2, LinalgError};

/// Singular values below this fraction of the largest count as zero.
const RANK_TOL: f64 = 1e-12;

/// First `d` left singular vectors of the `n x s` matrix `m`, ordered by
/// descending singular value.
///
/// Works through the `s x s` Gram matrix `m^T m`, which is cheap when
/// `s << n`. The result is re-orthonormalized column by column.
pub fn truncated_left_singular_vectors(m: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>, LinalgError> {
    let (n, s) = m.shape();
    if d == 0 {
        return Err(LinalgError::InvalidArgument("number of components must be positive"));
    }
    if d > s || d > n {
        return Err(LinalgError::InvalidArgument("expected d <= min(n, s)"));
    }
    let gram = m.transpose() * m;
    let eig = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let sigma: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0).sqrt()).collect();
    let rank = sigma.iter().filter(|&&v| v > RANK_TOL * sigma[0]).count();
    if sigma[0] == 0.0 || rank < d {
        return Err(LinalgError::RankDeficient { rank: if sigma[0] == 0.0 { 0 } else { rank }, requested: d });
    }

    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (k, &idx) in order.iter().take(d).enumerate() {
        let v = eig.eigenvectors.column(idx);
        let mut u = (m * v).iter().map(|x| x / sigma[k]).collect::<Vec<_>>();
        for prev in &cols {
            let c = dot(&u, prev);
            axpy(-c, prev, &mut u);
        }
        let norm = norm2(&u);
        u.iter_mut().for_each(|x| *x /= norm);
        cols.push(u);
    }
    Ok(DMatrix::from_fn(n, d, |i, j| cols[j][i]))
}

/// The PCA operators `P` (residual space) and `Q` (solution space) together
/// with the training means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectorPair {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub residual_mean: Vec<f64>,
    pub solution_mean: Vec<f64>,
}

impl ProjectorPair {
    pub fn components(&self) -> usize {
        self.p.ncols()
    }

    pub fn dimension(&self) -> usize {
        self.p.nrows()
    }

    /// `P^T v`.
    pub fn project_residual(&self, v: &[f64]) -> Vec<f64> {
        self.p.column_iter().map(|c| dot(c.as_slice(), v)).collect()
    }

    /// `Q c` for subspace coefficients `c`.
    pub fn lift_solution(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dimension()];
        for (j, cj) in c.iter().enumerate() {
            axpy(*cj, self.q.column(j).as_slice(), &mut out);
        }
        out
    }

    /// The approximate residual `P P^T (F - Fbar) + Fbar`.
    pub fn approximate_residual(&self, f: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = f.iter().zip(&self.residual_mean).map(|(a, b)| a - b).collect();
        let coeffs = self.project_residual(&centered);
        let mut out = self.residual_mean.clone();
        for (j, cj) in coeffs.iter().enumerate() {
            axpy(*cj, self.p.column(j).as_slice(), &mut out);
        }
        out
    }
}
