//! Amplitude-escape trapping set and the approach/recede partition.
//!
//! Once a collision has pumped the amplitude high enough, blow-up is no
//! longer in doubt; this module builds the certificate.  The set `X` lives
//! in the quarter-space `v <= 0`, `s >= 0` and consists of everything above
//! a piecewise-linear barrier: a flat ceiling of height `a_hat` between the
//! corner `v = -v_hat` and `v = 0`, and a line of slope `a_inf` rising to
//! the left of the corner.  Along the whole barrier the flow points into the
//! set — checked term by term:
//!
//! * **slant** (`v < -v_hat`): the inward flux `a_inf*v' + A'` has leading
//!   cubic coefficient `a_inf*[(p11 - p21) - a_inf^2*(p12 - p22)]`, which is
//!   positive for every slope in the admissible interval
//!   `(sqrt(p21/p22), sqrt(p11/p12)]` (at both interval endpoints it reduces
//!   to `a_inf * det_p / p12` resp. `a_inf * det_p / p22`, positive by the
//!   determinant condition, and it is monotone in `a_inf^2` between them);
//!   the interaction contributes `(M3 - a_inf*M2)*s >= 0` as long as
//!   `a_inf <= M3/M2`.
//! * **ceiling**: `A' = (-mu2 - p21*v^2 + p22*a_hat^2)*a_hat + M3*s`, which
//!   vanishes at the corner (the corner sits on the amplitude nullcline) and
//!   grows toward `v = 0`, where it equals `p21*v3^2*a_hat + M3*s > 0`.
//! * **wall** (`v = 0`): `v' = -M2*s <= 0`.
//! * **floor** (`s = 0`): invariant exactly (`s'` is proportional to `s`).
//!
//! The corner is placed on the amplitude nullcline `H`: at the mixed-mode
//! saddle itself when the damping is strong enough (`mu2 > mu2_star`), and
//! slid down the nullcline to the tangency-limited point `(v_X, A_X)` below
//! that, so the slant still clears the saddle's unstable cone.
//!
//! [`separation_region`] names the three-way partition by the sign of
//! `v + M1*s`, the gate that controls whether the pulses are closing
//! (`s` grows) or receding (`s` decays).

use crate::numerics::NumericsError;

use super::equilibria::{equilibria, EquilibriumLabel};
use super::params::ReducedParams;

/// Default barrier slope: the largest admissible value,
/// `min(sqrt(p11/p12), M3/M2)` — steep enough to dominate the amplitude
/// nullcline at infinity, capped so the interaction flux stays inward.
pub fn default_a_inf(p: &ReducedParams) -> f64 {
    (p.p11 / p.p12).sqrt().min(p.m3 / p.m2)
}

/// Damping level below which the barrier corner must leave the mixed-mode
/// saddle and slide down the amplitude nullcline.
pub fn mu2_star(p: &ReducedParams, a_inf: f64) -> f64 {
    let kappa =
        (-p.p21 + p.p21 * p.p21 / (a_inf * a_inf * p.p22)) / p.det_p();
    -kappa * p.p22 * p.mu1 / (1.0 - kappa * p.p12)
}

/// Velocity nullcline height `G(v) = sqrt((mu1 + p11*v^2)/p12)`, or `None`
/// where the radicand is negative (no balancing amplitude exists).
pub fn curve_g(p: &ReducedParams, v: f64) -> Option<f64> {
    let r = (p.mu1 + p.p11 * v * v) / p.p12;
    (r >= 0.0).then(|| r.sqrt())
}

/// Amplitude nullcline height `H(v) = sqrt((mu2 + p21*v^2)/p22)`, or `None`
/// where the radicand is negative.
pub fn curve_h(p: &ReducedParams, v: f64) -> Option<f64> {
    let r = (p.mu2 + p.p21 * v * v) / p.p22;
    (r >= 0.0).then(|| r.sqrt())
}

/// The amplitude-escape trapping set; see the module docs for the geometry.
#[derive(Clone, Copy, Debug)]
pub struct InvariantSet {
    /// Slope of the left barrier line.
    pub a_inf: f64,
    /// Corner position: the barrier is flat on `[-v_hat, 0]`.
    pub v_hat: f64,
    /// Barrier height at the corner (and along the ceiling).
    pub a_hat: f64,
    /// The corner-placement threshold for these parameters and this slope.
    pub mu2_star: f64,
    /// Whether the corner coincides with the mixed-mode saddle.
    pub corner_at_saddle: bool,
}

impl InvariantSet {
    /// Barrier height above velocity `v`.
    pub fn boundary_height(&self, v: f64) -> f64 {
        if v < -self.v_hat {
            -self.a_inf * (v + self.v_hat) + self.a_hat
        } else {
            self.a_hat
        }
    }

    /// Membership test for the state `(v, A, s)`.
    pub fn contains(&self, v: f64, a: f64, s: f64) -> bool {
        v <= 0.0 && s >= 0.0 && a >= self.boundary_height(v)
    }
}

/// Build the trapping set for `p`, with barrier slope `a_inf` (default:
/// [`default_a_inf`]).
///
/// Fails with `NoRoot` when the construction cannot work: the slope outside
/// its admissible interval `(sqrt(p21/p22), sqrt(p11/p12)]`, a slope that
/// would let the interaction flux point outward (`a_inf > M3/M2`), or the
/// mixed-mode saddle absent/degenerate (no corner to anchor the barrier).
pub fn invariant_set(
    p: &ReducedParams,
    a_inf: Option<f64>,
) -> Result<InvariantSet, NumericsError> {
    let a = a_inf.unwrap_or_else(|| default_a_inf(p));
    let lo = (p.p21 / p.p22).sqrt();
    let hi = (p.p11 / p.p12).sqrt();
    if !(a > lo && a <= hi) {
        return Err(NumericsError::NoRoot {
            why: format!(
                "barrier slope {a} outside the admissible interval \
                 ({lo}, {hi}]: the slant would not dominate the amplitude \
                 nullcline (low end) or the velocity cubic (high end)"
            ),
        });
    }
    if a > p.m3 / p.m2 {
        return Err(NumericsError::NoRoot {
            why: format!(
                "barrier slope {a} exceeds M3/M2 = {}; the interaction flux \
                 (M3 - a*M2)*s would point out of the set",
                p.m3 / p.m2
            ),
        });
    }
    let saddle = equilibria(p)
        .iter()
        .find(|e| e.label == EquilibriumLabel::Ep3Plus)
        .filter(|e| e.exists && e.v > 0.0)
        .map(|e| (e.v, e.a))
        .ok_or_else(|| NumericsError::NoRoot {
            why: "mixed-mode saddle absent: nothing anchors the barrier \
                  corner"
                .to_string(),
        })?;
    let (v3, a3) = saddle;

    let star = mu2_star(p, a);
    let (v_hat, a_hat, corner_at_saddle) = if p.mu2 > star {
        // Above the threshold the corner sits on the saddle itself, so a
        // zero-height saddle (possible exactly on the lower existence
        // boundary) cannot anchor it.
        if a3 <= 0.0 {
            return Err(NumericsError::NoRoot {
                why: "mixed-mode saddle has zero amplitude: nothing anchors \
                      the barrier corner"
                    .to_string(),
            });
        }
        (v3, a3, true)
    } else {
        let vx = (p.p22 * (a * v3 - a3) * (a * v3 - a3) - p.mu2)
            / ((a * a * p.p22 - p.p21) * v3);
        let ax = curve_h(p, vx).ok_or_else(|| NumericsError::NoRoot {
            why: format!(
                "slid corner at v = {vx} fell off the amplitude nullcline"
            ),
        })?;
        (vx, ax, false)
    };

    Ok(InvariantSet {
        a_inf: a,
        v_hat,
        a_hat,
        mu2_star: star,
        corner_at_saddle,
    })
}

/// Three-way partition of phase space by the approach/recede gate
/// `v + M1*s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeparationRegion {
    /// `v + M1*s > 0`: the pulses close in and the interaction grows.
    DPlus,
    /// `v + M1*s = 0` (exact): instantaneous standstill — the rebound
    /// surface.
    DZero,
    /// `v + M1*s < 0`: the pulses recede and the interaction decays.
    DMinus,
}

impl std::fmt::Display for SeparationRegion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SeparationRegion::DPlus => "D+",
            SeparationRegion::DZero => "D0",
            SeparationRegion::DMinus => "D-",
        })
    }
}

/// Which side of the rebound surface the state `(v, s)` lies on.
pub fn separation_region(p: &ReducedParams, v: f64, s: f64) -> SeparationRegion {
    let gate = v + p.m1 * s;
    if gate > 0.0 {
        SeparationRegion::DPlus
    } else if gate < 0.0 {
        SeparationRegion::DMinus
    } else {
        SeparationRegion::DZero
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::classify::{
        integrate_reduced, protocol_horizon, protocol_initial_state, TerminalEvent,
    };
    use crate::reduced::rhs::rhs_symmetric;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn saddle_coords(p: &ReducedParams) -> (f64, f64) {
        let e = equilibria(p);
        let ep3 = e
            .iter()
            .find(|q| q.label == EquilibriumLabel::Ep3Plus)
            .unwrap();
        assert!(ep3.exists);
        (ep3.v, ep3.a)
    }

    /// Inward flux through the barrier at `(v, a)` with interaction `s`:
    /// positive means the flow enters the set.
    fn slant_flux(set: &InvariantSet, p: &ReducedParams, v: f64, a: f64, s: f64) -> f64 {
        let d = rhs_symmetric(&[v, a, s], p);
        set.a_inf * d[0] + d[1]
    }

    #[test]
    fn both_nullclines_pass_through_the_saddle() {
        for (mu1, mu2) in [(-1e-3, 5e-4), (-1e-3, -2e-5), (-2e-4, 3e-4)] {
            let p = ReducedParams::benchmark(mu1, mu2);
            let (v3, a3) = saddle_coords(&p);
            let h = curve_h(&p, -v3).expect("H defined at the saddle");
            let g = curve_g(&p, v3).expect("G defined at the saddle");
            assert!(
                (h - a3).abs() <= 1e-12 * a3,
                "H(-v3) = {h} vs saddle height {a3}"
            );
            assert!(
                (g - a3).abs() <= 1e-12 * a3,
                "G(v3) = {g} vs saddle height {a3}"
            );
        }
    }

    #[test]
    fn canonical_default_slope_and_corner_threshold() {
        let p = ReducedParams::benchmark(-1e-3, 5e-4);
        assert_eq!(default_a_inf(&p), 1.0, "min(sqrt(1/1), 1/1)");
        let star = mu2_star(&p, 1.0);
        let want = -1e-3 / 30.0;
        assert!(
            (star - want).abs() <= 1e-12 * want.abs(),
            "mu2_star = {star:e}, expected mu1/30 = {want:e}"
        );
    }

    #[test]
    fn corner_sits_at_the_saddle_above_the_threshold_and_slides_below() {
        let p = ReducedParams::benchmark(-1e-3, 5e-4);
        let set = invariant_set(&p, None).expect("set");
        let (v3, a3) = saddle_coords(&p);
        assert!(set.corner_at_saddle);
        assert_eq!(set.v_hat, v3);
        assert_eq!(set.a_hat, a3);

        // At the saddle's lower existence edge the corner lands at
        // (3*v2, 2*v2) for the canonical block (closed-form check).
        let v2 = (1e-3f64).sqrt();
        let q = ReducedParams::benchmark(-1e-3, 0.05 * -1e-3);
        let slid = invariant_set(&q, None).expect("set");
        assert!(!slid.corner_at_saddle);
        assert!(
            (slid.v_hat - 3.0 * v2).abs() <= 1e-12 * v2,
            "v_hat = {}, expected {}",
            slid.v_hat,
            3.0 * v2
        );
        assert!(
            (slid.a_hat - 2.0 * v2).abs() <= 1e-12 * v2,
            "a_hat = {}, expected {}",
            slid.a_hat,
            2.0 * v2
        );
    }

    #[test]
    fn boundary_flux_points_inward_on_the_canonical_sets() {
        let s_values: Vec<f64> = std::iter::once(0.0)
            .chain((0..11).map(|k| 10f64.powf(-12.0 + k as f64)))
            .collect();
        for mu2 in [5e-4, -2e-5, 0.05 * -1e-3] {
            let p = ReducedParams::benchmark(-1e-3, mu2);
            let set = invariant_set(&p, None).expect("set");
            // Slant: 100 log-spaced offsets from grazing the corner to far
            // out along the line.
            for j in 0..100 {
                let u = set.v_hat * 10f64.powf(-6.0 + 7.0 * j as f64 / 99.0);
                let v = -set.v_hat - u;
                let a = set.a_hat + set.a_inf * u;
                if a > 1.0 {
                    break;
                }
                for &s in &s_values {
                    let flux = slant_flux(&set, &p, v, a, s);
                    assert!(
                        flux > 0.0,
                        "outward slant flux {flux:e} at mu2 = {mu2}, \
                         u = {u:e}, s = {s:e}"
                    );
                }
            }
            // Ceiling: strictly rising amplitude on the open segment.
            for j in 1..50 {
                let v = -set.v_hat * (1.0 - j as f64 / 50.0);
                for &s in &s_values {
                    let d = rhs_symmetric(&[v, set.a_hat, s], &p);
                    assert!(
                        d[1] > 0.0,
                        "ceiling amplitude flux {:e} at mu2 = {mu2}, v = {v}",
                        d[1]
                    );
                }
            }
            // Wall v = 0: no escape to positive velocity.
            for &s in &s_values {
                let d = rhs_symmetric(&[0.0, set.a_hat * 1.5, s], &p);
                assert!(d[0] <= 0.0, "wall flux {:e} at s = {s:e}", d[0]);
            }
        }
    }

    #[test]
    fn boundary_flux_stays_inward_across_compliant_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_e911);
        for draw in 0..20 {
            let p11 = rng.gen_range(0.3..3.0);
            let p12 = rng.gen_range(0.3..3.0);
            let p22 = rng.gen_range(0.3..3.0);
            let rho = rng.gen_range(0.02..0.8);
            let p21 = rho * p11 * p22 / p12;
            let mut p = ReducedParams {
                mu1: 0.0,
                mu2: 0.0,
                p11,
                p12,
                p21,
                p22,
                m1: rng.gen_range(-2.0..2.0),
                m2: rng.gen_range(0.3..3.0),
                m3: 1.0,
                alpha: rng.gen_range(0.3..3.0),
            };
            p.m3 = p.m2 * p.s6_bound() * (1.0 + rng.gen_range(0.1..2.0));
            let r = 10f64.powf(rng.gen_range(-5.0..-2.0));
            p.mu1 = -r;
            p.mu2 = rng.gen_range(0.2..1.0) * r;
            assert!(p.validate().is_empty(), "draw {draw} must be compliant");

            let set = invariant_set(&p, None).expect("set");
            assert!(set.corner_at_saddle, "mu2 > 0 > mu2_star here");
            for j in 0..20 {
                let u = set.v_hat * 10f64.powf(-6.0 + 7.0 * j as f64 / 19.0);
                let v = -set.v_hat - u;
                let a = set.a_hat + set.a_inf * u;
                for s in [0.0, 1e-6] {
                    let flux = slant_flux(&set, &p, v, a, s);
                    assert!(
                        flux > 0.0,
                        "draw {draw}: outward slant flux {flux:e} at u = {u:e}"
                    );
                }
            }
            for j in 1..10 {
                let v = -set.v_hat * (1.0 - j as f64 / 10.0);
                let d = rhs_symmetric(&[v, set.a_hat, 1e-8], &p);
                assert!(d[1] > 0.0, "draw {draw}: ceiling flux {:e}", d[1]);
            }
        }
    }

    #[test]
    fn pumped_orbit_enters_the_set_and_its_amplitude_never_retreats() {
        let p = ReducedParams::benchmark(-1e-3, -2e-5);
        let set = invariant_set(&p, None).expect("set");
        let horizon = protocol_horizon(&p).unwrap();
        let traj = integrate_reduced(&p, protocol_initial_state(&p), horizon, true)
            .expect("integrate");
        assert_eq!(traj.terminal, TerminalEvent::AmplitudeCutoff);

        let entered = (0..traj.t.len())
            .find(|&i| set.contains(traj.v[i], traj.a[i], traj.s[i]))
            .expect("the pumped orbit must enter the trapping set");
        for i in entered..traj.t.len() {
            assert!(
                traj.v[i] <= 0.0 && traj.s[i] >= 0.0,
                "left the quarter-space at t = {}",
                traj.t[i]
            );
            assert!(
                traj.a[i] >= set.boundary_height(traj.v[i]) - 1e-9,
                "fell below the barrier at t = {}",
                traj.t[i]
            );
            if i > entered {
                assert!(
                    traj.a[i] >= traj.a[i - 1] - 1e-9,
                    "amplitude retreated inside the set at t = {}",
                    traj.t[i]
                );
            }
        }
    }

    #[test]
    fn inadmissible_constructions_are_refused() {
        let p = ReducedParams::benchmark(-1e-3, 5e-4);
        for bad in [0.5, 1.2] {
            match invariant_set(&p, Some(bad)) {
                Err(NumericsError::NoRoot { why }) => {
                    assert!(
                        why.contains("slope"),
                        "unexpected message for slope {bad}: {why}"
                    );
                }
                other => panic!("slope {bad} should be refused, got {other:?}"),
            }
        }
        // Below the saddle's existence edge there is no anchor.
        let q = ReducedParams::benchmark(-1e-3, -8e-5);
        assert!(matches!(
            invariant_set(&q, None),
            Err(NumericsError::NoRoot { .. })
        ));
    }

    proptest! {
        #[test]
        fn separation_gate_and_interaction_sign_agree(
            v in -0.5f64..0.5,
            log_s in -30.0f64..-0.5,
        ) {
            let p = ReducedParams::benchmark(-1e-3, 5e-4);
            let s = log_s.exp();
            let region = separation_region(&p, v, s);
            let gate = v + p.m1 * s;
            let want = if gate > 0.0 {
                SeparationRegion::DPlus
            } else if gate < 0.0 {
                SeparationRegion::DMinus
            } else {
                SeparationRegion::DZero
            };
            prop_assert_eq!(region, want);

            let ds = rhs_symmetric(&[v, 0.1, s], &p)[2];
            match region {
                SeparationRegion::DPlus => prop_assert!(ds > 0.0),
                SeparationRegion::DMinus => prop_assert!(ds < 0.0),
                SeparationRegion::DZero => prop_assert_eq!(ds, 0.0),
            }
            let frozen = rhs_symmetric(&[v, 0.1, 0.0], &p)[2];
            prop_assert_eq!(frozen, 0.0, "the zero-interaction plane is flow-invariant");
        }
    }
}
