//! Pulse profiles, continuation, spectra, tails, and interaction constants.
//!
//! This layer turns the time-dependent three-component models into a static
//! boundary-value problem: a pulse moving at constant speed `c` is a steady
//! state of the comoving equations
//!
//! ```text
//! 0 = D S_zz + c T S_z + F(S),        z = x - c t,
//! ```
//!
//! where `D` and `T` are the diagonal diffusion and time-constant matrices and
//! `F` the reaction.  Everything else in the module is built on top of that
//! equation and its linearization about a solved profile:
//!
//! * [`find_standing_pulse`] / [`find_traveling_pulse`] solve the comoving
//!   equation by damped Newton iteration with a bordered linear solver.  The
//!   translational degeneracy is removed by a centroid pin (standing) or an
//!   integral phase condition (traveling), so the Jacobians handed to the
//!   factorization are square and — away from bifurcation points — uniformly
//!   invertible.
//! * [`leading_spectrum`] computes the few eigenvalues of the *evolution*
//!   linearization `T⁻¹(D ∂_zz + F'(S)) + c ∂_z` that decide pulse stability,
//!   together with the translation zero mode, its generalized partner, the
//!   corresponding adjoint (transpose) modes, and the oscillatory pair when one
//!   is present.  All pairings needed by the interaction constants are
//!   normalized here, with the achieved residuals reported instead of assumed.
//! * [`tail_fit`] / [`adjoint_tail_fit`] measure the exponential decay rate
//!   and signed per-component amplitudes of the pulse tails, which feed the
//!   closed-form constants in [`interaction_constants`].
//! * [`continue_branch`], [`detect_bifurcations`], and [`locate_dh_point`]
//!   trace solution branches in one parameter by pseudo-arclength
//!   continuation, refine eigenvalue crossings in one parameter, and chase the
//!   codimension-two point where a real crossing and an oscillatory crossing
//!   coincide in two parameters.
//! * [`perturb_and_evolve`] closes the loop with direct time integration of a
//!   solved profile plus a chosen eigenmode, so linear predictions (growth
//!   rates, oscillation frequencies) can be checked against the nonlinear
//!   dynamics they are supposed to describe.
//!
//! # Discrete conventions
//!
//! All fields use the component-major layout of [`crate::grid::Field1`]; where
//! a flat vector interleaved per node is needed (banded assembly), the
//! [`operator::FoldOrder`] permutation keeps the matrix bandwidth at 8 for
//! both periodic and Neumann boundaries, so one banded code path serves both.
//! Inner products are weighted trapezoid (Neumann) or plain periodic sums, and
//! complex pairings are bilinear — no conjugation — because the adjoint
//! normalizations that feed the interaction constants are algebraic identities
//! of the transposed matrix, not Hermitian ones.

pub mod branch;
pub mod constants;
pub mod evolve;
pub mod operator;
pub mod profile;
pub mod spectrum;
pub mod tails;

pub use branch::{
    attach_spectra, continue_branch, detect_bifurcations, locate_dh_point,
    seed_traveling_from_standing, Bifurcation, BifurcationKind, Branch, BranchPoint,
    CodimTwoPoint, ContinuationOptions,
};
pub use constants::{interaction_constants, InteractionConstants};
pub use evolve::{oscillation_frequency, perturb_and_evolve, EvolveRecord, Fate};
pub use operator::{evolution_operator, steady_jacobian, steady_residual, FoldOrder};
pub use profile::{
    find_standing_pulse, find_traveling_pulse, profile_from_solution, standing_pulse_from_bump,
    PulseProfile,
};
pub use spectrum::{leading_eigenvalues, leading_spectrum, EigenSummary, HopfMode, SpectralData};
pub use tails::{adjoint_tail_fit, tail_fit, AdjointTails, PulseTails};

use crate::numerics::NumericsError;
use thiserror::Error;

/// Errors produced while solving for, analyzing, or continuing pulses.
#[derive(Debug, Error)]
pub enum PulseError {
    /// Newton failed to drive the comoving residual below tolerance.
    #[error(
        "Newton did not converge after {iterations} iterations \
         (residual {residual:.3e}): {context}"
    )]
    NewtonDiverged {
        iterations: usize,
        residual: f64,
        context: String,
    },
    /// The iteration converged, but onto the spatially uniform background
    /// rather than a localized pulse.
    #[error(
        "converged to the uniform background state (pulse amplitude {amplitude:.3e}); \
         the initial guess lost its bump"
    )]
    ConvergedToUniform { amplitude: f64 },
    /// A tail window produced data that is not exponential to the required
    /// fidelity, e.g. because the window overlaps the pulse core.
    #[error(
        "tail is not exponential on the fitted window (R² = {r2:.6}, needed {needed}): {context}"
    )]
    TailNotExponential { r2: f64, needed: f64, context: String },
    /// A requested eigenmode could not be identified in the computed cluster.
    #[error("eigenmode identification failed: {0}")]
    ModeNotFound(String),
    /// A normalization pairing was too close to zero to divide by, which
    /// signals a defective or mis-identified mode pair.
    #[error("degenerate normalization: {pairing} = {value:.3e} is below {floor:.1e}")]
    DegenerateNormalization {
        pairing: &'static str,
        value: f64,
        floor: f64,
    },
    /// Continuation could not take a step even at the minimum step size.
    #[error("continuation stalled at parameter {param:.6}: {context}")]
    ContinuationStalled { param: f64, context: String },
    /// A two-parameter search left its trust window or stopped making
    /// progress before both target eigenvalues crossed zero.
    #[error("codimension-two search failed: {0}")]
    SearchFailed(String),
    /// An underlying linear-algebra or root-finding failure.
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}
