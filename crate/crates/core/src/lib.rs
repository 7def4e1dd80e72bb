//! Inexact Newton-Krylov solvers for `F(X) = 0`.
//!
//! * [`inb_solve`]: inexact Newton with Armijo backtracking and
//!   Eisenstat-Walker forcing terms, GMRES for the Newton equations.
//! * [`ardn_solve`]: the same loop with a residual-driven weighted merit
//!   function whose weights adapt to the slowest-converging equations.
//! * [`pinl_solve`]: learns a low-dimensional subspace from the first few
//!   iterates, solves a projected system there for a better starting point,
//!   then finishes with either solver above.
//!
//! The [`problems`] module holds the benchmark systems.

pub mod ardn;
pub mod error;
pub mod inb;
pub mod jacobian;
pub mod linalg;
pub mod options;
pub mod pinl;
pub mod problems;
pub mod report;
mod solver;
pub mod system;

pub use ardn::ardn_solve;
pub use error::SolveError;
pub use inb::{inb_solve, inb_solve_preconditioned, PreconditionerFactory};
pub use system::JacobianProvider;
pub use options::{OptionsError, SolverOptions, WeightStrategy};
pub use pinl::{pinl_solve, pinl_solve_with_training, InnerSolver};
pub use problems::{BenchmarkSpec, ProblemId, ProblemParams};
pub use report::{IterationRecord, PinlPhases, SolveReport, Termination};
pub use solver::{solve, SolverKind};
pub use system::{FnSystem, NonlinearSystem};
