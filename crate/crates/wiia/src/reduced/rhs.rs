//! Polynomial vector fields of the reduced systems.
//!
//! Three nested systems share one coefficient block:
//!
//! * the **single pulse** in `(v, A)` — the pair dynamics with the
//!   interaction switched off (`h = infinity`, `s = 0`);
//! * the **symmetric pair** in `(v, A, s)` — a head-on collision with the
//!   mirror symmetry `(v2, A2) = (-v1, A1)` imposed, which is the system
//!   every classification and sweep integrates;
//! * the **full two-pulse system** in `(v1, A1, v2, A2, s)` — kept for the
//!   embedding checks and for asymmetric experiments.
//!
//! All three are plain cubic/quadratic polynomials; evaluation is exact up
//! to rounding and there is nothing adaptive here. The symmetric reduction
//! of the two-pulse field reproduces the symmetric field identically
//! (`s' = -alpha*s*(v2 - v1 - 2*M1*s)` collapses to
//! `2*alpha*(v + M1*s)*s`), which the tests pin down.

use super::params::ReducedParams;

/// Single-pulse field: the `(v, A)` dynamics at infinite separation.
///
/// ```text
/// v' = (-mu1 - p11 v^2 + p12 A^2) v
/// A' = (-mu2 - p21 v^2 + p22 A^2) A
/// ```
#[must_use]
pub fn rhs_single(v: f64, a: f64, p: &ReducedParams) -> (f64, f64) {
    let dv = (-p.mu1 - p.p11 * v * v + p.p12 * a * a) * v;
    let da = (-p.mu2 - p.p21 * v * v + p.p22 * a * a) * a;
    (dv, da)
}

/// Symmetric head-on pair: state `[v, A, s]`.
///
/// ```text
/// v' = (-mu1 - p11 v^2 + p12 A^2) v - M2 s
/// A' = (-mu2 - p21 v^2 + p22 A^2) A + M3 s
/// s' = 2 alpha (v + M1 s) s
/// ```
///
/// `v > 0` means the pulses approach each other; the interaction brakes
/// the approach (`-M2 s`) and pumps the oscillation (`+M3 s`), and `s`
/// grows exactly while `v + M1 s > 0`.
#[must_use]
pub fn rhs_symmetric(x: &[f64; 3], p: &ReducedParams) -> [f64; 3] {
    let [v, a, s] = *x;
    let dv = (-p.mu1 - p.p11 * v * v + p.p12 * a * a) * v - p.m2 * s;
    let da = (-p.mu2 - p.p21 * v * v + p.p22 * a * a) * a + p.m3 * s;
    let ds = 2.0 * p.alpha * (v + p.m1 * s) * s;
    [dv, da, ds]
}

/// Full two-pulse system: state `[v1, A1, v2, A2, s]` with pulse 1 on the
/// left (positive `v1` = rightward, toward its partner) and pulse 2 on the
/// right.
///
/// ```text
/// v1' = (-mu1 - p11 v1^2 + p12 A1^2) v1 - M2 s
/// A1' = (-mu2 - p21 v1^2 + p22 A1^2) A1 + M3 s
/// v2' = (-mu1 - p11 v2^2 + p12 A2^2) v2 + M2 s
/// A2' = (-mu2 - p21 v2^2 + p22 A2^2) A2 + M3 s
/// s'  = -alpha s (v2 - v1 - 2 M1 s)
/// ```
#[must_use]
pub fn rhs_two_pulse(x: &[f64; 5], p: &ReducedParams) -> [f64; 5] {
    let [v1, a1, v2, a2, s] = *x;
    let dv1 = (-p.mu1 - p.p11 * v1 * v1 + p.p12 * a1 * a1) * v1 - p.m2 * s;
    let da1 = (-p.mu2 - p.p21 * v1 * v1 + p.p22 * a1 * a1) * a1 + p.m3 * s;
    let dv2 = (-p.mu1 - p.p11 * v2 * v2 + p.p12 * a2 * a2) * v2 + p.m2 * s;
    let da2 = (-p.mu2 - p.p21 * v2 * v2 + p.p22 * a2 * a2) * a2 + p.m3 * s;
    let ds = -p.alpha * s * (v2 - v1 - 2.0 * p.m1 * s);
    [dv1, da1, dv2, da2, ds]
}
