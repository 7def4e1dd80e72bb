//! Fixtures shared by the criterion benchmarks in `benches/`.

use nalgebra::DMatrix;
use newton_forge::linalg::FnOperator;

/// Shifted 1-D Laplacian `tridiag(-1, 2 + shift, -1)` as a matrix-free operator.
pub fn laplacian_1d(n: usize, shift: f64) -> FnOperator<impl Fn(&[f64], &mut [f64])> {
    FnOperator::new(n, move |v: &[f64], out: &mut [f64]| {
        for i in 0..n {
            let left = if i > 0 { v[i - 1] } else { 0.0 };
            let right = if i + 1 < n { v[i + 1] } else { 0.0 };
            out[i] = (2.0 + shift) * v[i] - left - right;
        }
    })
}

/// Deterministic snapshot matrix with a few dominant directions plus small
/// high-frequency noise, shaped like PIN^L training data.
pub fn snapshot_matrix(rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |i, j| {
        let t = i as f64 / rows as f64;
        let k = j as f64 + 1.0;
        (std::f64::consts::PI * t).sin() / k + (3.0 * std::f64::consts::PI * t).cos() / (k * k) + 1e-3 * ((i * 31 + j * 17) as f64).sin()
    })
}
