//! The six equilibrium families of the reduced system and their
//! closed-form stability.
//!
//! All equilibria live on the invariant plane `s = 0` (infinitely
//! separated pulses), so each one describes a single-pulse PDE state:
//!
//! | label | coordinates `(v, A)`      | exists for            | PDE state           |
//! |-------|---------------------------|-----------------------|---------------------|
//! | EP0   | `(0, 0)`                  | always                | standing pulse      |
//! | EP1   | `(0, sqrt(mu2/p22))`      | `mu2 >= 0`            | standing breather   |
//! | EP2±  | `(±sqrt(-mu1/p11), 0)`    | `mu1 <= 0`            | traveling pulse     |
//! | EP3±  | `(±v3, A3)` (see below)   | both radicands `>= 0` | traveling breather  |
//!
//! with `v3^2 = (-p22 mu1 + p12 mu2)/det`, `A3^2 = (-p21 mu1 + p11 mu2)/det`,
//! `det = p11 p22 - p12 p21 > 0`. The EP3 radicands are non-negative
//! exactly in sectors (ii)-(iv); on T2 they merge with EP2±
//! (`A3 = 0`), and radicands within a few ulp of zero are clamped to zero
//! so that merge is reported as existing rather than lost to rounding.
//!
//! The Jacobian of the symmetric three-variable field at any `s = 0`
//! equilibrium is block triangular: the `(v, A)` block decouples from the
//! `s` row, whose diagonal entry is `2 alpha v0`. The `(v, A)` block is
//! diagonal at EP0, EP1, and EP2 and a real saddle at EP3, so every
//! eigenvalue has a closed form and all of them are real:
//!
//! * EP0: `(-mu1, -mu2, 0)`
//! * EP1: `(-mu1 + p12 mu2 / p22, 2 mu2, 0)`
//! * EP2±: `(2 mu1, -(mu2 - mu2~), ±2 alpha v2)` with `mu2~ = (p21/p11) mu1`
//! * EP3±: `q ± sqrt(q^2 + 4 det v3^2 A3^2)` with `q = p22 A3^2 - p11 v3^2`
//!   (one positive, one negative: a saddle), plus `±2 alpha v3`
//!
//! Note the `s`-eigenvalue vanishes at EP0 and EP1: the interaction
//! strength is not hyperbolic there (`s` relaxes only algebraically),
//! which is why the trajectory classifier never demands `s`-convergence
//! at the origin.

use super::params::ReducedParams;
use std::fmt;

/// Which equilibrium family a record describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquilibriumLabel {
    Ep0,
    Ep1,
    Ep2Plus,
    Ep2Minus,
    Ep3Plus,
    Ep3Minus,
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            EquilibriumLabel::Ep0 => "EP0",
            EquilibriumLabel::Ep1 => "EP1",
            EquilibriumLabel::Ep2Plus => "EP2+",
            EquilibriumLabel::Ep2Minus => "EP2-",
            EquilibriumLabel::Ep3Plus => "EP3+",
            EquilibriumLabel::Ep3Minus => "EP3-",
        };
        f.write_str(name)
    }
}

/// Single-pulse PDE state the equilibrium corresponds to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PdeInterpretation {
    StandingPulse,
    StandingBreather,
    TravelingPulse,
    TravelingBreather,
}

impl fmt::Display for PdeInterpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PdeInterpretation::StandingPulse => "SP",
            PdeInterpretation::StandingBreather => "SB",
            PdeInterpretation::TravelingPulse => "TP",
            PdeInterpretation::TravelingBreather => "TB",
        };
        f.write_str(name)
    }
}

/// One equilibrium of the symmetric three-variable system (`s = 0`).
///
/// When `exists` is false the coordinates and eigenvalues are `NaN` so
/// accidental use poisons downstream arithmetic instead of silently
/// producing plausible numbers.
#[derive(Clone, Copy, Debug)]
pub struct Equilibrium {
    pub label: EquilibriumLabel,
    pub v: f64,
    pub a: f64,
    pub exists: bool,
    /// Real eigenvalues of the 3-D Jacobian, ordered: the two in-plane
    /// `(v, A)` eigenvalues (larger first for the EP3 saddle), then the
    /// separation eigenvalue `2 alpha v`.
    pub eigenvalues: [f64; 3],
    pub interpretation: PdeInterpretation,
}

/// Radicands within this relative slack of zero (either sign) count as
/// exactly zero, so the EP3-EP2 merge on T2 survives rounding in
/// `mu2~ = (p21/p11) mu1` and is reported as a clean `A3 = 0`.
const RADICAND_SLACK: f64 = 1.0e-13;

fn clamped_sqrt(radicand: f64, scale: f64) -> Option<f64> {
    if radicand.abs() <= RADICAND_SLACK * scale {
        Some(0.0)
    } else if radicand > 0.0 {
        Some(radicand.sqrt())
    } else {
        None
    }
}

/// All six equilibrium families at `p`, in the fixed order EP0, EP1,
/// EP2+, EP2-, EP3+, EP3-. Existence follows the table in the module
/// docs; absent members keep their label with `exists = false`.
#[must_use]
pub fn equilibria(p: &ReducedParams) -> [Equilibrium; 6] {
    let absent = |label, interpretation| Equilibrium {
        label,
        v: f64::NAN,
        a: f64::NAN,
        exists: false,
        eigenvalues: [f64::NAN; 3],
        interpretation,
    };

    let ep0 = Equilibrium {
        label: EquilibriumLabel::Ep0,
        v: 0.0,
        a: 0.0,
        exists: true,
        eigenvalues: [-p.mu1, -p.mu2, 0.0],
        interpretation: PdeInterpretation::StandingPulse,
    };

    let ep1 = if p.mu2 >= 0.0 {
        let a1 = (p.mu2 / p.p22).sqrt();
        Equilibrium {
            label: EquilibriumLabel::Ep1,
            v: 0.0,
            a: a1,
            exists: true,
            eigenvalues: [-p.mu1 + p.p12 * p.mu2 / p.p22, 2.0 * p.mu2, 0.0],
            interpretation: PdeInterpretation::StandingBreather,
        }
    } else {
        absent(EquilibriumLabel::Ep1, PdeInterpretation::StandingBreather)
    };

    let (ep2p, ep2m) = if p.mu1 <= 0.0 {
        let v2 = (-p.mu1 / p.p11).sqrt();
        let in_plane = [2.0 * p.mu1, -(p.mu2 - p.mu_tilde2())];
        let make = |label, sign: f64| Equilibrium {
            label,
            v: sign * v2,
            a: 0.0,
            exists: true,
            eigenvalues: [in_plane[0], in_plane[1], sign * 2.0 * p.alpha * v2],
            interpretation: PdeInterpretation::TravelingPulse,
        };
        (
            make(EquilibriumLabel::Ep2Plus, 1.0),
            make(EquilibriumLabel::Ep2Minus, -1.0),
        )
    } else {
        (
            absent(EquilibriumLabel::Ep2Plus, PdeInterpretation::TravelingPulse),
            absent(EquilibriumLabel::Ep2Minus, PdeInterpretation::TravelingPulse),
        )
    };

    let det = p.det_p();
    let v3_rad = (-p.p22 * p.mu1 + p.p12 * p.mu2) / det;
    let a3_rad = (-p.p21 * p.mu1 + p.p11 * p.mu2) / det;
    let scale = (p.mu1.abs() + p.mu2.abs()) * (p.p11 + p.p12 + p.p21 + p.p22) / det;
    let (ep3p, ep3m) = match (clamped_sqrt(v3_rad, scale), clamped_sqrt(a3_rad, scale)) {
        (Some(v3), Some(a3)) => {
            let q = p.p22 * a3 * a3 - p.p11 * v3 * v3;
            let root = (q * q + 4.0 * det * v3 * v3 * a3 * a3).sqrt();
            let make = |label, sign: f64| Equilibrium {
                label,
                v: sign * v3,
                a: a3,
                exists: true,
                eigenvalues: [q + root, q - root, sign * 2.0 * p.alpha * v3],
                interpretation: PdeInterpretation::TravelingBreather,
            };
            (
                make(EquilibriumLabel::Ep3Plus, 1.0),
                make(EquilibriumLabel::Ep3Minus, -1.0),
            )
        }
        _ => (
            absent(EquilibriumLabel::Ep3Plus, PdeInterpretation::TravelingBreather),
            absent(EquilibriumLabel::Ep3Minus, PdeInterpretation::TravelingBreather),
        ),
    };

    [ep0, ep1, ep2p, ep2m, ep3p, ep3m]
}

/// Eigenvector of the 3-D Jacobian at EP2+ for its unstable separation
/// eigenvalue `lambda = 2 alpha v2`, normalized to `z = 1`:
///
/// ```text
/// x = -M2 / (2 p11 v2^2 + 2 alpha v2)
/// y =  M3 / (2 alpha v2 + mu2 - mu2~)
/// z =  1
/// ```
///
/// On T2 (`mu2 = mu2~`) the `y` component reduces to `M3/(2 alpha v2)`.
/// Near T2 the in-plane slope satisfies `y/x < -M3/M2`: an orbit leaving
/// EP2+ along this direction as `s` grows gains oscillation amplitude
/// faster than the rebound line `A = -(M3/M2) v` does.
///
/// Requires `mu1 < 0` (EP2+ hyperbolic in `s`); returns `None` otherwise
/// or when a denominator degenerates.
#[must_use]
pub fn ep2_unstable_eigenvector(p: &ReducedParams) -> Option<[f64; 3]> {
    if p.mu1 >= 0.0 {
        return None;
    }
    let v2 = (-p.mu1 / p.p11).sqrt();
    let dx = 2.0 * p.p11 * v2 * v2 + 2.0 * p.alpha * v2;
    let dy = 2.0 * p.alpha * v2 + (p.mu2 - p.mu_tilde2());
    if dx == 0.0 || dy == 0.0 {
        return None;
    }
    Some([-p.m2 / dx, p.m3 / dy, 1.0])
}
