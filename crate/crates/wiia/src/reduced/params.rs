//! Coefficient block of the reduced system and its named well-posedness
//! conditions.
//!
//! The reduced dynamics is fixed by ten numbers: the unfolding parameters
//! `mu1` (drift) and `mu2` (Hopf), the four cubic coefficients `p11, p12,
//! p21, p22` of the in-plane normal form, the three interaction constants
//! `M1, M2, M3` fed by the tail overlap, and the tail decay rate `alpha`.
//!
//! Four conditions on the block are used throughout the crate and are
//! referred to by fixed names so that configuration errors and test
//! output can cite them precisely:
//!
//! * **(S5)** — all four cubic coefficients positive and
//!   `p12*p21/(p11*p22) < 1`. Structural: the equilibrium closed forms
//!   divide by `p11*p22 - p12*p21` and every sector formula assumes the
//!   stated sign pattern. Violations are fatal.
//! * **(S4)** — `M2 > 0` and `M3 > 0`: head-on interaction decelerates
//!   the pulses and pumps the oscillation. Violations are overridable
//!   (the vector field still integrates; the annihilation mechanism is
//!   just no longer guaranteed).
//! * **(S6)** — `M3/M2` exceeds
//!   `max(sqrt(3*p21/p22), 2*p21*sqrt(p11*p12)/(p11*p22 - p12*p21))`.
//!   Sufficient condition for the trapping-region construction in
//!   [`invariant`](super::invariant); overridable for the same reason as
//!   (S4). Notably the benchmark phase-diagram block below sits *outside*
//!   (S6) (its bound is 2.0 while `M3/M2 = 1`), yet its boundary-flow
//!   inequalities still hold numerically — (S6) is sufficient, not
//!   necessary.
//! * **tail rate** — `alpha > 0`, so `s = exp(-alpha*h)` actually decays
//!   with separation. Fatal.

use std::fmt;

/// Coefficients of the reduced pulse-interaction system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedParams {
    /// Drift unfolding parameter (negative past the drift instability).
    pub mu1: f64,
    /// Hopf unfolding parameter (negative past the Hopf instability).
    pub mu2: f64,
    /// Cubic self-saturation of the drift amplitude.
    pub p11: f64,
    /// Drive of the drift amplitude by the oscillation amplitude.
    pub p12: f64,
    /// Suppression of the oscillation by the drift.
    pub p21: f64,
    /// Cubic self-excitation of the oscillation amplitude.
    pub p22: f64,
    /// Interaction feedback on the separation rate itself.
    pub m1: f64,
    /// Deceleration of the approach per unit interaction strength.
    pub m2: f64,
    /// Pumping of the oscillation per unit interaction strength.
    pub m3: f64,
    /// Tail decay rate of the pulse profile; `s = exp(-alpha*h)`.
    pub alpha: f64,
}

/// Named conditions on [`ReducedParams`]; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `M2 > 0, M3 > 0`.
    S4,
    /// Positive cubic coefficients with `p12*p21/(p11*p22) < 1`.
    S5,
    /// `M3/M2` above the trapping-region bound.
    S6,
    /// `alpha > 0`.
    TailRate,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::S4 => write!(f, "(S4)"),
            Condition::S5 => write!(f, "(S5)"),
            Condition::S6 => write!(f, "(S6)"),
            Condition::TailRate => write!(f, "tail-rate"),
        }
    }
}

/// One violated condition, with the offending values spelled out.
#[derive(Clone, Debug)]
pub struct ConditionViolation {
    pub condition: Condition,
    /// Human-readable statement of the violated inequality with values.
    pub detail: String,
    /// Fatal violations make the reduced system itself meaningless;
    /// non-fatal ones only void the annihilation guarantees and may be
    /// overridden deliberately.
    pub fatal: bool,
}

impl fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated: {}", self.condition, self.detail)
    }
}

impl ReducedParams {
    /// The phase-diagram benchmark coefficient block:
    /// `p11 = 1, p12 = 1, p21 = 0.05, p22 = 0.1, M2 = M3 = 1`.
    ///
    /// The block leaves `alpha` and `M1` free; both default to 1 here (the
    /// trapping-region and threshold lemmas depend only on `alpha > 0` and
    /// `|M1|`) and every persisted output records the values actually
    /// used. Note this block violates (S6) — see the module docs.
    #[must_use]
    pub fn benchmark(mu1: f64, mu2: f64) -> Self {
        Self {
            mu1,
            mu2,
            p11: 1.0,
            p12: 1.0,
            p21: 0.05,
            p22: 0.1,
            m1: 1.0,
            m2: 1.0,
            m3: 1.0,
            alpha: 1.0,
        }
    }

    /// Same coefficient block, different unfolding point.
    #[must_use]
    pub fn with_mu(&self, mu1: f64, mu2: f64) -> Self {
        Self { mu1, mu2, ..*self }
    }

    /// Determinant `p11*p22 - p12*p21` of the cubic coefficient matrix;
    /// positive under (S5).
    #[must_use]
    pub fn det_p(&self) -> f64 {
        self.p11 * self.p22 - self.p12 * self.p21
    }

    /// Height of the transcritical line T2 at this `mu1`:
    /// `mu2~ = (p21/p11)*mu1`. On T2 the mixed equilibria EP3± merge into
    /// the traveling equilibria EP2±.
    #[must_use]
    pub fn mu_tilde2(&self) -> f64 {
        (self.p21 / self.p11) * self.mu1
    }

    /// Polar angle of the transcritical line T1 (direction `(p12, p22)`,
    /// first quadrant).
    #[must_use]
    pub fn theta_t1(&self) -> f64 {
        self.p22.atan2(self.p12)
    }

    /// Polar angle of the transcritical line T2 (direction `(-p11, -p21)`,
    /// third quadrant), reported in `[0, 2*pi)`.
    #[must_use]
    pub fn theta_t2(&self) -> f64 {
        std::f64::consts::PI + self.p21.atan2(self.p11)
    }

    /// The (S6) right-hand side:
    /// `max(sqrt(3*p21/p22), 2*p21*sqrt(p11*p12)/(p11*p22 - p12*p21))`.
    /// Meaningful only under (S5) (positive denominator).
    #[must_use]
    pub fn s6_bound(&self) -> f64 {
        let first = (3.0 * self.p21 / self.p22).sqrt();
        let second = 2.0 * self.p21 * (self.p11 * self.p12).sqrt() / self.det_p();
        first.max(second)
    }

    /// Check every named condition; an empty return means the block is
    /// inside the fully proven regime.
    #[must_use]
    pub fn validate(&self) -> Vec<ConditionViolation> {
        let mut out = Vec::new();
        let positive_p =
            self.p11 > 0.0 && self.p12 > 0.0 && self.p21 > 0.0 && self.p22 > 0.0;
        if !positive_p {
            out.push(ConditionViolation {
                condition: Condition::S5,
                detail: format!(
                    "all cubic coefficients must be positive; got p11={}, p12={}, p21={}, p22={}",
                    self.p11, self.p12, self.p21, self.p22
                ),
                fatal: true,
            });
        } else {
            let ratio = self.p12 * self.p21 / (self.p11 * self.p22);
            if ratio >= 1.0 {
                out.push(ConditionViolation {
                    condition: Condition::S5,
                    detail: format!(
                        "p12*p21/(p11*p22) = {ratio} must be < 1 (cross coupling dominates the diagonal)"
                    ),
                    fatal: true,
                });
            }
        }
        if !(self.alpha > 0.0) {
            out.push(ConditionViolation {
                condition: Condition::TailRate,
                detail: format!("alpha = {} must be positive for s = exp(-alpha*h) to decay", self.alpha),
                fatal: true,
            });
        }
        if !(self.m2 > 0.0 && self.m3 > 0.0) {
            out.push(ConditionViolation {
                condition: Condition::S4,
                detail: format!("M2 = {} and M3 = {} must both be positive", self.m2, self.m3),
                fatal: false,
            });
        } else if positive_p && self.det_p() > 0.0 {
            // (S6) is only stated inside (S4)+(S5); skip it when those fail.
            let bound = self.s6_bound();
            let ratio = self.m3 / self.m2;
            if ratio <= bound {
                out.push(ConditionViolation {
                    condition: Condition::S6,
                    detail: format!(
                        "M3/M2 = {ratio} must exceed max(sqrt(3*p21/p22), 2*p21*sqrt(p11*p12)/det) = {bound}"
                    ),
                    fatal: false,
                });
            }
        }
        out
    }

    /// True when no condition — fatal or overridable — is violated.
    #[must_use]
    pub fn in_proven_regime(&self) -> bool {
        self.validate().is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_block_echoes_the_published_values() {
        let p = ReducedParams::benchmark(-1.0e-3, 5.0e-4);
        assert_eq!(
            (p.p11, p.p12, p.p21, p.p22),
            (1.0, 1.0, 0.05, 0.1),
            "cubic coefficient block"
        );
        assert_eq!((p.m2, p.m3), (1.0, 1.0), "interaction constants");
        assert_eq!((p.alpha, p.m1), (1.0, 1.0), "defaulted tail rate and M1");
        assert!((p.det_p() - 0.05).abs() < 1e-15, "det_p = {}", p.det_p());
        assert!(
            (p.mu_tilde2() - (-5.0e-5)).abs() < 1e-18,
            "T2 height at mu1=-1e-3 is {}",
            p.mu_tilde2()
        );
    }

    #[test]
    fn transcritical_angles_match_the_benchmark_geometry() {
        let p = ReducedParams::benchmark(0.0, 0.0);
        // atan(0.1) and pi + atan(0.05).
        assert!(
            (p.theta_t1() - 0.099_668_652_491_162).abs() < 1e-12,
            "theta_T1 = {}",
            p.theta_t1()
        );
        assert!(
            (p.theta_t2() - 3.191_551_049_311_736).abs() < 1e-12,
            "theta_T2 = {}",
            p.theta_t2()
        );
    }

    #[test]
    fn benchmark_block_sits_outside_s6_and_nowhere_else() {
        let p = ReducedParams::benchmark(-1.0e-3, 5.0e-4);
        let violations = p.validate();
        assert_eq!(violations.len(), 1, "violations: {violations:?}");
        assert_eq!(violations[0].condition, Condition::S6);
        assert!(!violations[0].fatal, "(S6) must be overridable");
        // The bound is max(sqrt(1.5), 2*0.05/0.05) = 2 while M3/M2 = 1.
        assert!((p.s6_bound() - 2.0).abs() < 1e-14, "s6 bound = {}", p.s6_bound());
    }

    #[test]
    fn dominant_cross_coupling_is_a_fatal_s5_violation() {
        let p = ReducedParams {
            p12: 3.0,
            p21: 0.05,
            ..ReducedParams::benchmark(0.0, 0.0)
        };
        // p12*p21/(p11*p22) = 1.5 >= 1.
        let violations: Vec<_> = p.validate().into_iter().filter(|v| v.fatal).collect();
        assert_eq!(violations.len(), 1, "violations: {violations:?}");
        assert_eq!(violations[0].condition, Condition::S5);
        assert!(
            violations[0].detail.contains("1.5"),
            "detail should carry the offending ratio: {}",
            violations[0].detail
        );
    }

    #[test]
    fn negative_pumping_trips_s4_but_not_fatally() {
        let p = ReducedParams {
            m3: -1.0,
            ..ReducedParams::benchmark(0.0, 0.0)
        };
        let violations = p.validate();
        assert_eq!(violations.len(), 1, "violations: {violations:?}");
        assert_eq!(violations[0].condition, Condition::S4);
        assert!(!violations[0].fatal);
    }

    #[test]
    fn raising_the_pump_ratio_restores_the_proven_regime() {
        // Same cubic block as the benchmark; M3/M2 = 2.2 > bound = 2.
        let p = ReducedParams {
            m3: 2.2,
            ..ReducedParams::benchmark(-1.0e-3, 5.0e-4)
        };
        assert!(p.in_proven_regime(), "violations: {:?}", p.validate());
    }

    #[test]
    fn zero_tail_rate_is_fatal() {
        let p = ReducedParams {
            alpha: 0.0,
            ..ReducedParams::benchmark(0.0, 0.0)
        };
        let violations = p.validate();
        assert!(
            violations.iter().any(|v| v.condition == Condition::TailRate && v.fatal),
            "violations: {violations:?}"
        );
    }
}
