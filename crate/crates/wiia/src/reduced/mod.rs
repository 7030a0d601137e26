//! Reduced pulse-interaction dynamics near the drift-Hopf codimension-2
//! point.
//!
//! Close to the codimension-2 point a symmetric pair of weakly interacting
//! pulses is governed by three slow scalars: the drift amplitude `v` (odd
//! velocity mode), the oscillation amplitude `A` (Hopf mode, kept
//! non-negative by convention), and the interaction strength
//! `s = exp(-alpha h)` carried by the overlapping exponential tails at
//! separation `2h`. This module implements that finite-dimensional system
//! and everything the laboratory asks of it:
//!
//! * [`params`] — the coefficient block ([`ReducedParams`]) and the named
//!   well-posedness conditions (S4), (S5), (S6) with their validation;
//! * [`rhs`] — the polynomial vector fields (single pulse, symmetric pair,
//!   full two-pulse system);
//! * [`equilibria`] — the six equilibrium families EP0..EP3± with
//!   closed-form coordinates, closed-form stability, and their
//!   interpretation as PDE states (standing/traveling pulse or breather);
//! * [`regions`] — the six sectors of the `(mu1, mu2)` unfolding plane cut
//!   by the drift line, the Hopf line, and the two transcritical lines
//!   T1/T2;
//! * [`classify`] — event-driven trajectory integration and the
//!   standing / preservation / annihilation / background verdict for one
//!   parameter point;
//! * [`sweep`] — phase-diagram sweeps over rings and grids of `(mu1, mu2)`;
//! * [`critical`] — bisection for the critical `mu2` separating
//!   preservation from annihilation, with the separator-saddle proximity
//!   check;
//! * [`sstar`] — the threshold interaction strength `s*` below which an
//!   incoming pair rebounds;
//! * [`manifold`] — the slaved (center-manifold) relation `A(s, v)` in the
//!   Hopf-stable regime, in both published candidate forms;
//! * [`invariant`] — the wedge-shaped trapping region `X` in which `A`
//!   grows monotonically to the extinction cutoff, with its boundary-flow
//!   checks.
//!
//! Everything here is pure arithmetic on `(state, params)`; integration is
//! delegated to the shared embedded Runge-Kutta driver. Trajectories that
//! need the interaction strength over hundreds of decades integrate
//! `sigma = ln s` instead of `s` itself, so step-size control sees a
//! well-scaled variable; see [`classify`] for the rationale.

pub mod classify;
pub mod critical;
pub mod equilibria;
pub mod invariant;
pub mod manifold;
pub mod params;
pub mod regions;
pub mod rhs;
pub mod sstar;
pub mod sweep;

pub use classify::{
    classify, classify_from, integrate_reduced, protocol_initial_state, ClassifiedRun, Outcome,
    ReboundRecord, ReducedTrajectory, TerminalEvent,
};
pub use critical::{find_mu2_critical, SeparatorResult};
pub use equilibria::{
    ep2_unstable_eigenvector, equilibria, Equilibrium, EquilibriumLabel, PdeInterpretation,
};
pub use invariant::{
    curve_g, curve_h, default_a_inf, invariant_set, mu2_star, separation_region, InvariantSet,
    SeparationRegion,
};
pub use manifold::{center_manifold_a, compare_on_trajectory, CenterManifoldForm, ManifoldComparison};
pub use params::{Condition, ConditionViolation, ReducedParams};
pub use regions::{region_id, Region};
pub use rhs::{rhs_single, rhs_symmetric, rhs_two_pulse};
pub use sstar::{sstar_asymptotic, sstar_root};
pub use sweep::{ring_sector_runs, sweep_grid, sweep_ring, PhaseDiagram, RingCell, SectorRun};
