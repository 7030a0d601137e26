//! Numerical laboratory for localized pulses in three-component
//! reaction-diffusion systems near a drift-Hopf codimension-2 point.
//!
//! The crate has three layers:
//!
//! * **PDE layer** — [`grid`] and [`models`] provide 1-D/2-D fields, a
//!   semi-implicit (IMEX) time stepper with backward-Euler diffusion, and the
//!   two reaction models used throughout: a three-component
//!   FitzHugh-Nagumo-type system and an activator-substrate-inhibitor
//!   system. [`pulse`] finds standing and traveling pulse profiles by
//!   Newton iteration, continues them in a parameter, computes leading
//!   spectra (translation, drift, and Hopf modes plus adjoints) by
//!   shift-invert iteration, fits exponential tails, and assembles the
//!   pulse-interaction constants. [`collide`] runs head-on two-pulse
//!   collision experiments and classifies their outcome.
//!
//! * **Reduced layer** — [`reduced`] implements the finite-dimensional
//!   normal-form system for a symmetric pulse pair near the codimension-2
//!   point: a drift amplitude `v`, an oscillation amplitude `A`, and a
//!   separation proxy `s = exp(-alpha h)`. It provides equilibria with
//!   closed-form stability, parameter-plane regions, trajectory
//!   classification (standing / preservation / annihilation / background),
//!   phase-diagram sweeps, the annihilation-preservation separator, and the
//!   slow-manifold relation between `A` and `(s, v)`.
//!
//! * **Support layer** — [`numerics`] holds the shared machinery: banded LU
//!   with partial pivoting (real and complex), bordered-system elimination,
//!   Newton drivers, pseudo-arclength continuation, shift-invert Arnoldi,
//!   an embedded Runge-Kutta integrator with event location, root brackets,
//!   and tail fitting. [`io`] holds experiment configs, CSV/SVG emitters,
//!   and run manifests used by the `wiia` command-line driver.
//!
//! Determinism: every algorithm in the crate is deterministic for a fixed
//! input. With the `parallel` feature enabled, sweeps distribute independent
//! cells across threads but each cell's arithmetic is unchanged and outputs
//! are written in a fixed order, so results are bitwise identical to the
//! sequential build.

pub mod collide;
pub mod grid;
pub mod io;
pub mod models;
pub mod numerics;
pub mod pulse;
pub mod reduced;
