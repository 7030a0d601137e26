//! Shared numerical machinery: banded and bordered linear solves, Newton
//! drivers, shift-invert Arnoldi eigensolving, an embedded Runge-Kutta
//! integrator with event location, bracketed root finding, and linear
//! least-squares fits for exponential tails.
//!
//! Everything here is deterministic: no randomized pivoting, no
//! thread-order-dependent reductions, no wall-clock-seeded starting vectors.

pub mod arnoldi;
pub mod banded;
pub mod bordered;
pub mod fit;
pub mod heig;
pub mod newton;
pub mod rk45;
pub mod roots;
pub mod scalar;
pub mod tridiag;

pub use arnoldi::{complex_pair_near, eigenvalues_near, RitzPair};
pub use banded::{multiply, BandFactor, BandedMatrix};
pub use bordered::{solve_bordered, BorderedSystem};
pub use fit::{fit_exp_amplitude_fixed_rate, fit_exp_tail, linear_fit, ExpTailFit, LineFit};
pub use heig::hessenberg_eigenvalues;
pub use newton::{newton_solve, NewtonOptions, NewtonReport};
pub use rk45::{
    integrate, EventAction, EventDirection, EventHit, EventSpec, OdeOptions, OdeSolution,
};
pub use roots::{bisect, secant, Bracket};
pub use scalar::Scalar;
pub use tridiag::{CyclicTridiagFactor, TridiagFactor};

/// Errors shared by the numerical kernels.
#[derive(Debug, thiserror::Error)]
pub enum NumericsError {
    /// A pivot smaller than the breakdown threshold was encountered while
    /// factoring a matrix; the system is singular to working precision.
    #[error("matrix is singular to working precision (pivot {pivot:.3e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    /// An iteration failed to reach its tolerance within the allowed number
    /// of steps.
    #[error("{what} did not converge within {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// A root finder was handed a bracket whose endpoints do not straddle a
    /// sign change.
    #[error("endpoints do not bracket a root: f({a:.6e}) = {fa:.6e}, f({b:.6e}) = {fb:.6e}")]
    NoBracket { a: f64, fa: f64, b: f64, fb: f64 },

    /// The requested root does not exist for the supplied parameters.
    #[error("no root exists: {why}")]
    NoRoot { why: String },

    /// Inconsistent dimensions were passed to a kernel.
    #[error("dimension mismatch: {what}")]
    DimensionMismatch { what: String },
}
