//! The benchmark suite: chemical equilibrium, 2-D convection-diffusion, and
//! the scalable problems P1-P5.

mod banded;
mod chemical;
mod convdiff;
mod rosenbrock;
mod valley;

pub use banded::{FiveDiagonal, Tridiagonal};
pub use chemical::ChemicalEquilibrium;
pub use convdiff::ConvectionDiffusion;
pub use rosenbrock::{AugmentedRosenbrock, ModifiedRosenbrock};
pub use valley::TridimensionalValley;

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::SolveError;
use crate::options::SolverOptions;
use crate::system::NonlinearSystem;

/// A problem instance with its prescribed starting point and settings.
pub struct BenchmarkSpec {
    pub name: String,
    pub system: Box<dyn NonlinearSystem>,
    pub initial_guess: Vec<f64>,
    /// Recommended solver settings for this problem.
    pub options: SolverOptions,
    pub known_solution: Option<Vec<f64>>,
}

impl fmt::Debug for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkSpec")
            .field("name", &self.name)
            .field("dimension", &self.system.dimension())
            .field("options", &self.options)
            .field("known_solution", &self.known_solution.is_some())
            .finish()
    }
}

/// Registry key of a benchmark problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemId {
    Chemical,
    Convdiff,
    P1,
    P2,
    P3,
    P4,
    P5,
}

impl ProblemId {
    pub const ALL: [ProblemId; 7] = [
        Self::Chemical,
        Self::Convdiff,
        Self::P1,
        Self::P2,
        Self::P3,
        Self::P4,
        Self::P5,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Chemical => "chemical",
            Self::Convdiff => "convdiff",
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::P3 => "p3",
            Self::P4 => "p4",
            Self::P5 => "p5",
        }
    }

    /// Smallest size used for this problem in the reference experiments.
    pub fn default_size(self) -> Option<usize> {
        match self {
            Self::Chemical | Self::Convdiff => None,
            Self::P1 | Self::P3 => Some(60),
            Self::P2 => Some(6000),
            Self::P4 => Some(100),
            Self::P5 => Some(1200),
        }
    }
}

impl FromStr for ProblemId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown problem `{s}` (expected chemical | convdiff | p1 | p2 | p3 | p4 | p5)"))
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Size and physical parameters. Unset fields take the problem's default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    /// Number of unknowns for P1-P5.
    pub size: Option<usize>,
    /// Convection coefficient `C` of the convection-diffusion problem (default 100).
    pub c: Option<f64>,
    /// Interior grid points per direction for convection-diffusion (default 50).
    pub grid: Option<usize>,
}

/// Builds a registered benchmark.
pub fn build(id: ProblemId, params: ProblemParams) -> Result<BenchmarkSpec, SolveError> {
    let size = params.size.or(id.default_size());
    match id {
        ProblemId::Chemical => Ok(chemical_equilibrium()),
        ProblemId::Convdiff => convection_diffusion(params.c.unwrap_or(100.0), params.grid.unwrap_or(50)),
        ProblemId::P1 => modified_rosenbrock(size.unwrap_or(60)),
        ProblemId::P2 => augmented_rosenbrock(size.unwrap_or(6000)),
        ProblemId::P3 => tridiagonal(size.unwrap_or(60)),
        ProblemId::P4 => five_diagonal(size.unwrap_or(100)),
        ProblemId::P5 => tridimensional_valley(size.unwrap_or(1200)),
    }
}

fn scalable_options(stagnation_tau: f64) -> SolverOptions {
    SolverOptions { g_max: 12, stagnation_tau, ..Default::default() }
}

/// Five-species chemical equilibrium, started from the origin with a
/// finite-difference Jacobian.
pub fn chemical_equilibrium() -> BenchmarkSpec {
    BenchmarkSpec {
        name: "chemical".into(),
        system: Box::new(ChemicalEquilibrium::default()),
        initial_guess: vec![0.0; 5],
        options: SolverOptions { g_max: 36, ..Default::default() },
        known_solution: None,
    }
}

pub fn convection_diffusion(c: f64, grid_n: usize) -> Result<BenchmarkSpec, SolveError> {
    let sys = ConvectionDiffusion::new(c, grid_n)?;
    let n = sys.dimension();
    Ok(BenchmarkSpec {
        name: format!("convdiff(C={c},{grid_n}x{grid_n})"),
        system: Box::new(sys),
        initial_guess: vec![0.0; n],
        options: SolverOptions {
            rel_tol: 1e-10,
            stagnation_tau: 1e-2,
            g_max: 24,
            gmres_restart: 50,
            ..Default::default()
        },
        known_solution: None,
    })
}

pub fn modified_rosenbrock(n: usize) -> Result<BenchmarkSpec, SolveError> {
    let sys = ModifiedRosenbrock::new(n)?;
    Ok(BenchmarkSpec {
        name: format!("p1(n={n})"),
        initial_guess: sys.initial_guess(),
        known_solution: Some(sys.solution()),
        system: Box::new(sys),
        options: scalable_options(1e-2),
    })
}

pub fn augmented_rosenbrock(n: usize) -> Result<BenchmarkSpec, SolveError> {
    let sys = AugmentedRosenbrock::new(n)?;
    Ok(BenchmarkSpec {
        name: format!("p2(n={n})"),
        initial_guess: sys.initial_guess(),
        known_solution: None,
        system: Box::new(sys),
        options: scalable_options(1e-6),
    })
}

pub fn tridiagonal(n: usize) -> Result<BenchmarkSpec, SolveError> {
    let sys = Tridiagonal::new(n)?;
    Ok(BenchmarkSpec {
        name: format!("p3(n={n})"),
        initial_guess: vec![12.0; n],
        known_solution: Some(vec![1.0; n]),
        system: Box::new(sys),
        options: scalable_options(1e-6),
    })
}

pub fn five_diagonal(n: usize) -> Result<BenchmarkSpec, SolveError> {
    let sys = FiveDiagonal::new(n)?;
    Ok(BenchmarkSpec {
        name: format!("p4(n={n})"),
        initial_guess: vec![12.0; n],
        known_solution: Some(vec![1.0; n]),
        system: Box::new(sys),
        options: scalable_options(1e-6),
    })
}

pub fn tridimensional_valley(n: usize) -> Result<BenchmarkSpec, SolveError> {
    let sys = TridimensionalValley::new(n)?;
    Ok(BenchmarkSpec {
        name: format!("p5(n={n})"),
        initial_guess: sys.initial_guess(),
        known_solution: None,
        system: Box::new(sys),
        options: scalable_options(1e-2),
    })
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;

    #[test]
    fn registry_round_trip() {
        for id in ProblemId::ALL {
            assert_eq!(id.as_str().parse::<ProblemId>().unwrap(), id);
        }
        assert!("p6".parse::<ProblemId>().is_err());
    }

    #[test]
    fn registry_builds_every_problem_at_small_size() {
        let sizes = [
            (ProblemId::Chemical, None),
            (ProblemId::Convdiff, None),
            (ProblemId::P1, Some(10)),
            (ProblemId::P2, Some(8)),
            (ProblemId::P3, Some(10)),
            (ProblemId::P4, Some(10)),
            (ProblemId::P5, Some(9)),
        ];
        for (id, size) in sizes {
            let spec = build(id, ProblemParams { size, c: Some(20.0), grid: Some(5) }).unwrap();
            assert_eq!(spec.initial_guess.len(), spec.system.dimension());
            let f = spec.system.eval(&spec.initial_guess);
            assert!(f.iter().all(|v| v.is_finite()), "{}", spec.name);
            spec.options.validate().unwrap();
        }
    }

    #[test]
    fn known_solutions_are_roots() {
        for spec in [modified_rosenbrock(60).unwrap(), tridiagonal(60).unwrap(), five_diagonal(100).unwrap()] {
            let x = spec.known_solution.as_ref().unwrap();
            assert!(norm2(&spec.system.eval(x)) <= 1e-8, "{}", spec.name);
        }
    }

    #[test]
    fn invalid_sizes_are_rejected() {
        assert!(modified_rosenbrock(7).is_err());
        assert!(augmented_rosenbrock(10).is_err());
        assert!(tridiagonal(2).is_err());
        assert!(five_diagonal(4).is_err());
        assert!(tridimensional_valley(8).is_err());
        assert!(convection_diffusion(10.0, 2).is_err());
    }
}
