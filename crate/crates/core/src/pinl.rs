//! Inexact Newton with a learned initial guess: a few inner-solver steps
//! provide training data, PCA of the centred residuals and iterates gives a
//! low-dimensional subspace, a small Newton solve there yields a better
//! starting point, and the inner solver restarts from it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::SolveError;
use crate::inb::{NewtonLoop, Weighting};
use crate::jacobian::jacobian_vector_product;
use crate::linalg::{dense_solve, norm2, truncated_left_singular_vectors, LinalgError, ProjectorPair};
use crate::options::SolverOptions;
use crate::report::{PinlPhases, SolveReport};
use crate::system::NonlinearSystem;

/// Solver used for the training and global phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerSolver {
    #[default]
    Inb,
    Ardn,
}

impl InnerSolver {
    fn weighting(self) -> Weighting {
        match self {
            Self::Inb => Weighting::Unweighted,
            Self::Ardn => Weighting::Adaptive,
        }
    }
}

impl FromStr for InnerSolver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inb" => Ok(Self::Inb),
            "ardn" => Ok(Self::Ardn),
            other => Err(format!("unknown inner solver `{other}` (expected inb | ardn)")),
        }
    }
}

impl fmt::Display for InnerSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Inb => "inb",
            Self::Ardn => "ardn",
        })
    }
}

/// Centred snapshot matrices from the first `s` iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingData {
    /// Column `k` is `F(X^k) - Fbar`.
    pub residuals: DMatrix<f64>,
    /// Column `k` is `X^k - Xbar`.
    pub solutions: DMatrix<f64>,
    pub residual_mean: Vec<f64>,
    pub solution_mean: Vec<f64>,
    pub last_iterate: Vec<f64>,
    /// `||F(X^k)||` for `k = 0 .. s-1`.
    pub residual_norms: Vec<f64>,
    pub elapsed: f64,
}

impl TrainingData {
    pub fn samples(&self) -> usize {
        self.residuals.ncols()
    }

    fn from_snapshots(xs: &[Vec<f64>], fs: &[Vec<f64>], elapsed: f64) -> Self {
        let n = xs[0].len();
        let s = xs.len();
        let mean = |cols: &[Vec<f64>]| -> Vec<f64> {
            let mut m = vec![0.0; n];
            for c in cols {
                for (mi, ci) in m.iter_mut().zip(c) {
                    *mi += ci;
                }
            }
            m.iter_mut().for_each(|v| *v /= s as f64);
            m
        };
        let residual_mean = mean(fs);
        let solution_mean = mean(xs);
        Self {
            residuals: DMatrix::from_fn(n, s, |i, k| fs[k][i] - residual_mean[i]),
            solutions: DMatrix::from_fn(n, s, |i, k| xs[k][i] - solution_mean[i]),
            residual_mean,
            solution_mean,
            last_iterate: xs[s - 1].clone(),
            residual_norms: fs.iter().map(|f| norm2(f)).collect(),
            elapsed,
        }
    }
}

/// Result of the training phase.
#[derive(Debug, Clone, PartialEq)]
pub enum Training {
    Data(TrainingData),
    /// The inner solver stopped before producing `s` iterates (usually because
    /// it already converged); its report is the final answer.
    Finished(SolveReport),
}

/// Runs `s - 1` inner steps from `x0` and centres the `s` iterates and residuals.
pub fn collect_training_data(
    inner: InnerSolver,
    system: &dyn NonlinearSystem,
    x0: &[f64],
    s: usize,
    options: &SolverOptions,
) -> Result<Training, SolveError> {
    if s == 0 {
        return Err(SolveError::Options(crate::options::OptionsError::ZeroCount { name: "pinl_training_size" }));
    }
    let start = Instant::now();
    let mut xs: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut fs: Vec<Vec<f64>> = Vec::with_capacity(s);
    let mut record = |x: &[f64], f: &[f64]| {
        xs.push(x.to_vec());
        fs.push(f.to_vec());
    };
    let mut run = NewtonLoop::new(system, options, inner.weighting());
    run.step_limit = Some(s - 1);
    run.observer = Some(&mut record);
    let report = run.run(x0)?;
    if report.converged || xs.len() < s {
        return Ok(Training::Finished(report));
    }
    Ok(Training::Data(TrainingData::from_snapshots(&xs, &fs, start.elapsed().as_secs_f64())))
}

/// `P` and `Q` from the leading `d` left singular vectors of the training matrices.
pub fn build_projectors(data: &TrainingData, d: usize) -> Result<ProjectorPair, LinalgError> {
    Ok(ProjectorPair {
        p: truncated_left_singular_vectors(&data.residuals, d)?,
        q: truncated_left_singular_vectors(&data.solutions, d)?,
        residual_mean: data.residual_mean.clone(),
        solution_mean: data.solution_mean.clone(),
    })
}

/// Outcome of the projected Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceOutcome {
    pub point: Vec<f64>,
    pub iterations: usize,
    /// `||F(Y^j)||`, `j = 1 ..= iterations`.
    pub residual_norms: Vec<f64>,
    /// `||PP^T(F(Y^j) - Fbar) + Fbar||`, `j = 0 ..= iterations`.
    pub projected_norms: Vec<f64>,
    pub converged: bool,
    /// The projected Jacobian was singular (or the iteration blew up) and
    /// `point` is the starting guess.
    pub fallback: bool,
}

/// Full-step Newton on `P^T F(y) = 0` restricted to `y = y0 + Q c`.
///
/// Each step solves `(P^T F'(y) Q) s = -P^T F(y)` with the `d x d` projected
/// Jacobian assembled from `d` Jacobian-vector products.
pub fn subspace_newton(
    system: &dyn NonlinearSystem,
    proj: &ProjectorPair,
    y0: &[f64],
    gamma_s: f64,
    max_iters: usize,
) -> Result<SubspaceOutcome, SolveError> {
    let n = system.dimension();
    if y0.len() != n || proj.dimension() != n {
        return Err(SolveError::DimensionMismatch { expected: n, actual: y0.len().max(proj.dimension()) });
    }
    let d = proj.components();
    let fallback = |residual_norms, projected_norms, iterations| SubspaceOutcome {
        point: y0.to_vec(),
        iterations,
        residual_norms,
        projected_norms,
        converged: false,
        fallback: true,
    };

    let mut y = y0.to_vec();
    let mut fy = system.eval(&y);
    let target = gamma_s * norm2(&proj.approximate_residual(&fy));
    let mut projected_norms = vec![norm2(&proj.approximate_residual(&fy))];
    let mut residual_norms = Vec::new();

    for j in 0..max_iters {
        if projected_norms[j] <= target {
            return Ok(SubspaceOutcome { point: y, iterations: j, residual_norms, projected_norms, converged: true, fallback: false });
        }
        let mut jp = DMatrix::zeros(d, d);
        for c in 0..d {
            let jq = match jacobian_vector_product(system, &y, proj.q.column(c).as_slice(), &fy) {
                Ok(v) => v,
                Err(e) => {
                    log::warn!("subspace Newton: Jacobian product failed ({e}); keeping the training iterate");
                    return Ok(fallback(residual_norms, projected_norms, j));
                }
            };
            for (r, v) in proj.project_residual(&jq).into_iter().enumerate() {
                jp[(r, c)] = v;
            }
        }
        let rhs: Vec<f64> = proj.project_residual(&fy).into_iter().map(|v| -v).collect();
        let sp = match dense_solve(&jp, &rhs) {
            Ok(sp) => sp,
            Err(LinalgError::Singular { .. }) => {
                log::warn!("subspace Newton: singular projected Jacobian at step {j}; keeping the training iterate");
                return Ok(fallback(residual_norms, projected_norms, j));
            }
            Err(e) => return Err(e.into()),
        };
        for (yi, di) in y.iter_mut().zip(proj.lift_solution(&sp)) {
            *yi += di;
        }
        system.residual(&y, &mut fy);
        if fy.iter().any(|v| !v.is_finite()) {
            log::warn!("subspace Newton: residual not finite at step {}; keeping the training iterate", j + 1);
            return Ok(fallback(residual_norms, projected_norms, j + 1));
        }
        residual_norms.push(norm2(&fy));
        projected_norms.push(norm2(&proj.approximate_residual(&fy)));
        log::trace!("subspace j={} |F|={:.6e} |Fp|={:.6e}", j + 1, residual_norms[j], projected_norms[j + 1]);
    }
    let converged = projected_norms[max_iters] <= target;
    Ok(SubspaceOutcome { point: y, iterations: max_iters, residual_norms, projected_norms, converged, fallback: false })
}

/// Training, projector construction, subspace solve, and a global inner
/// solve from the learned initial guess.
///
/// The returned report's history and `n_ite` cover the global phase; the
/// other phases are summarised in [`SolveReport::pinl`].
pub fn pinl_solve(
    system: &dyn NonlinearSystem,
    x0: &[f64],
    options: &SolverOptions,
    inner: InnerSolver,
) -> Result<SolveReport, SolveError> {
    pinl_solve_with_training(system, system, x0, options, inner)
}

/// As [`pinl_solve`], but the projectors are learned on `training_system`
/// (a cheaper problem of the same size) before solving `system`.
pub fn pinl_solve_with_training(
    system: &dyn NonlinearSystem,
    training_system: &dyn NonlinearSystem,
    x0: &[f64],
    options: &SolverOptions,
    inner: InnerSolver,
) -> Result<SolveReport, SolveError> {
    options.validate()?;
    if training_system.dimension() != system.dimension() {
        return Err(SolveError::DimensionMismatch { expected: system.dimension(), actual: training_system.dimension() });
    }
    let label = format!("pinl+{inner}");
    let s = options.pinl_training_size;

    let data = match collect_training_data(inner, training_system, x0, s, options)? {
        Training::Data(data) => data,
        Training::Finished(mut report) => {
            log::debug!("pinl: inner solver stopped during training ({:?})", report.termination);
            report.solver = label;
            return Ok(report);
        }
    };

    let sub_start = Instant::now();
    let proj = build_projectors(&data, options.pinl_components)?;
    let sub = subspace_newton(
        system,
        &proj,
        &data.last_iterate,
        options.pinl_subspace_rel_tol,
        options.pinl_subspace_max_iters,
    )?;
    let subspace_time = sub_start.elapsed().as_secs_f64();
    log::debug!("pinl: subspace phase {} iterations, converged={}", sub.iterations, sub.converged);

    let global = NewtonLoop::new(system, options, inner.weighting()).run(&sub.point)?;
    let phases = PinlPhases {
        inner: inner.to_string(),
        training_iterations: data.samples(),
        training_residual_norms: data.residual_norms.clone(),
        training_time: data.elapsed,
        subspace_iterations: sub.iterations,
        subspace_residual_norms: sub.residual_norms,
        subspace_projected_norms: sub.projected_norms,
        subspace_converged: sub.converged,
        subspace_fallback: sub.fallback,
        subspace_time,
        global_iterations: global.n_ite,
        global_time: global.wall_time,
    };
    Ok(SolveReport {
        solver: label,
        wall_time: data.elapsed + subspace_time + global.wall_time,
        pinl: Some(phases),
        ..global
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::FnSystem;

    fn snapshots(cols: &[&[f64]]) -> Vec<Vec<f64>> {
        cols.iter().map(|c| c.to_vec()).collect()
    }

    #[test]
    fn single_sample_centres_to_zero() {
        let xs = snapshots(&[&[1.0, 2.0]]);
        let fs = snapshots(&[&[3.0, -1.0]]);
        let data = TrainingData::from_snapshots(&xs, &fs, 0.0);
        assert_eq!(data.residuals, DMatrix::zeros(2, 1));
        assert_eq!(data.solutions, DMatrix::zeros(2, 1));
        assert_eq!(data.residual_mean, vec![3.0, -1.0]);
    }

    #[test]
    fn two_samples_centre_symmetrically() {
        let xs = snapshots(&[&[1.0, 4.0], &[3.0, 0.0]]);
        let fs = snapshots(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let data = TrainingData::from_snapshots(&xs, &fs, 0.0);
        assert_eq!(data.solutions.column(0).as_slice(), &[-1.0, 2.0]);
        assert_eq!(data.solutions.column(1).as_slice(), &[1.0, -2.0]);
        assert_eq!(data.last_iterate, vec![3.0, 0.0]);
    }

    fn full_projector(n: usize) -> ProjectorPair {
        let eye = DMatrix::identity(n, n);
        ProjectorPair { p: eye.clone(), q: eye, residual_mean: vec![0.0; n], solution_mean: vec![0.0; n] }
    }

    #[test]
    fn full_space_affine_solves_in_one_step() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let sys = FnSystem::affine(a, vec![1.0, 2.0, 3.0]);
        let out = subspace_newton(&sys, &full_projector(3), &[0.0; 3], 1e-10, 5).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.converged);
        assert!(out.residual_norms[0] < 1e-12);
    }

    #[test]
    fn singular_projection_falls_back_to_start() {
        // F only depends on x0, but Q spans x1 alone.
        let sys = FnSystem::new(2, |x, out| {
            out[0] = x[0] - 1.0;
            out[1] = 0.0;
        });
        let proj = ProjectorPair {
            p: DMatrix::from_column_slice(2, 1, &[1.0, 0.0]),
            q: DMatrix::from_column_slice(2, 1, &[0.0, 1.0]),
            residual_mean: vec![0.0; 2],
            solution_mean: vec![0.0; 2],
        };
        let out = subspace_newton(&sys, &proj, &[5.0, 7.0], 1e-2, 10).unwrap();
        assert!(out.fallback);
        assert_eq!(out.point, vec![5.0, 7.0]);
    }

    #[test]
    fn projected_residual_identity() {
        let p = truncated_left_singular_vectors(
            &DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 2.0, 1.0, 0.0, 3.0, 1.0, 1.0]),
            2,
        )
        .unwrap();
        let proj = ProjectorPair { q: p.clone(), p, residual_mean: vec![0.5, -1.0, 2.0, 0.0], solution_mean: vec![0.0; 4] };
        let f = [1.5, 2.0, -0.5, 3.0];
        let approx = proj.approximate_residual(&f);
        let lhs = proj.project_residual(&approx);
        let rhs = proj.project_residual(&f);
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() <= 1e-12 * norm2(&f));
        }
    }

    fn coupled() -> FnSystem {
        FnSystem::new(3, |x, out| {
            out[0] = x[0] * x[0] + x[1] - 2.0;
            out[1] = x[1] * x[1] * x[1] - x[2] + 0.5 * x[0];
            out[2] = x[2] - 0.5 * (x[0] + x[1]);
        })
    }

    #[test]
    fn early_convergence_is_reported_directly() {
        let sys = FnSystem::affine(DMatrix::identity(2, 2), vec![1.0, 1.0]);
        let opts = SolverOptions { pinl_training_size: 6, ..Default::default() };
        let report = pinl_solve(&sys, &[0.0, 0.0], &opts, InnerSolver::Inb).unwrap();
        assert!(report.converged);
        assert!(report.pinl.is_none());
        assert_eq!(report.solver, "pinl+inb");
    }

    #[test]
    fn training_collects_exactly_s_iterates() {
        let sys = coupled();
        let opts = SolverOptions { g_max: 2, ..Default::default() };
        match collect_training_data(InnerSolver::Ardn, &sys, &[3.0, -2.0, 4.0], 3, &opts).unwrap() {
            Training::Data(d) => {
                assert_eq!(d.samples(), 3);
                assert_eq!(d.residual_norms.len(), 3);
            }
            Training::Finished(r) => panic!("converged in {} steps", r.n_ite),
        }
    }

    #[test]
    fn phases_are_reported() {
        let sys = coupled();
        let opts = SolverOptions { pinl_training_size: 3, pinl_components: 1, g_max: 2, ..Default::default() };
        let report = pinl_solve(&sys, &[3.0, -2.0, 4.0], &opts, InnerSolver::Ardn).unwrap();
        assert!(report.converged, "{:?}", report.termination);
        let ph = report.pinl.as_ref().unwrap();
        assert_eq!(ph.training_iterations, 3);
        assert_eq!(ph.global_iterations, report.n_ite);
        assert_eq!(ph.subspace_projected_norms.len(), ph.subspace_iterations + 1);
        assert_eq!(ph.inner, "ardn");
    }

    #[test]
    fn inner_solver_parses() {
        assert_eq!("ardn".parse::<InnerSolver>().unwrap(), InnerSolver::Ardn);
        assert!("pinl".parse::<InnerSolver>().is_err());
        assert_eq!(InnerSolver::Inb.to_string(), "inb");
    }
}
