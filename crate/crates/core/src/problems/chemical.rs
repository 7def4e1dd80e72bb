use nalgebra::DMatrix;

use crate::system::{JacobianProvider, NonlinearSystem};

const R: f64 = 10.0;
const R5: f64 = 0.193;

/// Reaction constants that carry a `sqrt(40)` or `40` scaling.
fn constants() -> (f64, f64, f64, f64, f64) {
    let s40 = 40f64.sqrt();
    let r6 = 0.002597 / s40;
    let r7 = 0.003448 / s40;
    let r8 = 0.00001799 / 40.0;
    let r9 = 0.0002155 / s40;
    let r10 = 0.00003846 / 40.0;
    (r6, r7, r8, r9, r10)
}

/// Combustion-product chemical equilibrium in five unknowns.
///
/// The Jacobian is badly conditioned near the origin (the fourth column
/// vanishes there), which makes plain backtracking Newton stall.
#[derive(Debug, Clone, Copy)]
pub struct ChemicalEquilibrium {
    provider: JacobianProvider,
}

impl Default for ChemicalEquilibrium {
    fn default() -> Self {
        Self { provider: JacobianProvider::FiniteDifference }
    }
}

impl ChemicalEquilibrium {
    /// Same system, but solvers use the analytic Jacobian.
    pub fn with_analytic_jacobian() -> Self {
        Self { provider: JacobianProvider::AnalyticMatrix }
    }
}

impl NonlinearSystem for ChemicalEquilibrium {
    fn dimension(&self) -> usize {
        5
    }

    fn residual(&self, x: &[f64], out: &mut [f64]) {
        let (r6, r7, r8, r9, r10) = constants();
        let (x1, x2, x3, x4, x5) = (x[0], x[1], x[2], x[3], x[4]);
        out[0] = x1 * x2 + x1 - 3.0 * x5;
        out[1] = 2.0 * x1 * x2 + x1 + x2 * x3 * x3 + r8 * x2 - R * x5
            + 2.0 * r10 * x2 * x2
            + r7 * x2 * x3
            + r9 * x2 * x4;
        out[2] = 2.0 * x2 * x3 * x3 - 8.0 * x5 + r6 * x3 + r7 * x2 * x3;
        out[3] = r9 * x2 * x4 + 2.0 * x4 * x4 - 4.0 * R * x5;
        out[4] = x1 * (x2 + 1.0) + r10 * x2 * x2 + r8 * x2 + R5 * x3 * x3 - 1.0
            + r6 * x3
            + r7 * x2 * x3
            + r9 * x2 * x4;
    }

    fn jacobian_provider(&self) -> JacobianProvider {
        self.provider
    }

    fn analytic_jacobian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let (r6, r7, r8, r9, r10) = constants();
        let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
        #[rustfmt::skip]
        let rows = [
            x2 + 1.0, x1, 0.0, 0.0, -3.0,
            2.0 * x2 + 1.0,
            2.0 * x1 + x3 * x3 + r8 + 4.0 * r10 * x2 + r7 * x3 + r9 * x4,
            2.0 * x2 * x3 + r7 * x2,
            r9 * x2,
            -R,
            0.0, 2.0 * x3 * x3 + r7 * x3, 4.0 * x2 * x3 + r6 + r7 * x2, 0.0, -8.0,
            0.0, r9 * x4, 0.0, r9 * x2 + 4.0 * x4, -4.0 * R,
            x2 + 1.0,
            x1 + 2.0 * r10 * x2 + r8 + r7 * x3 + r9 * x4,
            2.0 * R5 * x3 + r6 + r7 * x2,
            r9 * x2,
            0.0,
        ];
        Some(DMatrix::from_row_slice(5, 5, &rows))
    }
}
