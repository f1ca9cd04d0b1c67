//! Symplectic Pontryagin approximation of Hamilton–Jacobi–Bellman value functions.
//!
//! The crate solves terminal-value problems
//!
//! ```text
//! u_t + H(x, u_x) = 0,   u(x, T) = g(x),
//! ```
//!
//! for Hamiltonians that are concave and Lipschitz in the dual variable, by
//! regularizing `H` to a differentiable `H^δ` and solving the symplectic Euler
//! discretization of the associated Hamiltonian boundary value problem
//!
//! ```text
//! x_{n+1} = x_n + Δt H^δ_λ(x_n, λ_{n+1}),   x_0 = x_s,
//! λ_n     = λ_{n+1} + Δt H^δ_x(x_n, λ_{n+1}), λ_N = g'(x_N).
//! ```
//!
//! Alongside the scheme it ships the machinery needed to check the answer
//! independently:
//!
//! - [`problem`]: problem definitions, numerical Legendre–Fenchel transforms,
//!   regularization with certified sup-norm error, and constant verification.
//! - [`solver`]: damped forward–backward sweeps for the discrete system.
//! - [`variational`]: direct minimization of the discrete cost functional,
//!   multiplier extraction and an exhaustive brute-force oracle.
//! - [`oracle`]: closed-form value functions and a semi-Lagrangian grid
//!   dynamic-programming solver.
//! - [`harness`]: (Δt, δ) sweeps, error-bound verdicts, order fitting and
//!   CSV/SVG reports.
//! - [`catalog`]: ready-made problems with certified constants.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod catalog;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod variational;

mod optim;

pub use error::{Error, Result};
pub use problem::{
    BoxDomain, Constants, ControlProblem, ExtendedReal, Hamiltonian, RegularizationMethod,
    RegularizedHamiltonian, RunningCost, StateCost,
};
pub use solver::{solve_tpbvp, DiscreteTrajectory, SweepOptions};
pub use variational::{minimize_j, DiscreteValue, VariationalOptions};
