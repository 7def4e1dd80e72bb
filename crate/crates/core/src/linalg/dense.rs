use nalgebra::DMatrix;

use super::LinalgError;

/// Relative pivot size below which a matrix is treated as singular.
const PIVOT_TOL: f64 = 1e-14;

/// Solves `a x = b` by LU factorization with partial pivoting.
///
/// Intended for the small projected systems of the subspace Newton phase.
pub fn dense_solve(a: &DMatrix<f64>, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(LinalgError::InvalidArgument("dense_solve needs a square matrix"));
    }
    if b.len() != n {
        return Err(LinalgError::DimensionMismatch { expected: n, actual: b.len() });
    }
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return Err(LinalgError::Singular { column: 0, pivot: 0.0 });
    }
    let threshold = PIVOT_TOL * scale;

    let mut lu = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let (p, pivot) = (col..n)
            .map(|r| (r, lu[(r, col)].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot <= threshold {
            return Err(LinalgError::Singular { column: col, pivot });
        }
        if p != col {
            lu.swap_rows(p, col);
            x.swap(p, col);
        }
        let diag = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / diag;
            if factor == 0.0 {
                continue;
            }
            lu[(r, col)] = 0.0;
            for c in col + 1..n {
                lu[(r, c)] -= factor * lu[(col, c)];
            }
            x[r] -= factor * x[col];
        }
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for c in r + 1..n {
            acc -= lu[(r, c)] * x[c];
        }
        x[r] = acc / lu[(r, r)];
    }
    Ok(x)
}
