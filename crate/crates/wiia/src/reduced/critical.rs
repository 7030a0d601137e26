//! Locator for the preservation/annihilation separator.
//!
//! Along a slice of fixed `mu1 < 0`, the collision outcome switches from
//! annihilation (low `mu2`: the pumped amplitude escapes) to preservation
//! (high `mu2`: the amplitude is damped back and the pulses separate) at a
//! critical value `mu2_c`.  The switch is a separatrix crossing — the
//! protocol orbit grazes the stable set of the mixed-mode saddle — so `mu2_c`
//! cannot be read off any closed form; it is found by bisecting the outcome
//! of the full classification protocol.
//!
//! Bisection on a discrete outcome needs endpoints that already disagree in
//! the expected way (annihilation below, preservation above); anything else
//! is reported as a bracketing failure rather than guessed around.  As a
//! witness that the located value really is the separatrix crossing, the
//! result carries the closest approach of the critical orbit to the
//! mixed-mode saddle: at `mu2_c` known to ~1e-12 the orbit must pass well
//! inside one part in a thousand of the saddle's distance from the origin.

use crate::numerics::NumericsError;

use super::classify::{
    classify, integrate_reduced, protocol_horizon, protocol_initial_state, Outcome,
};
use super::equilibria::{equilibria, EquilibriumLabel};
use super::params::ReducedParams;
use super::sweep::MAX_SWEEP_RADIUS;

/// Bisection stops once the bracket is narrower than this.
pub const MU2_TOLERANCE: f64 = 1e-12;

/// Hard cap on bisection steps (a width-`1e-3` bracket reaches the
/// tolerance in ~37).
pub const MAX_BISECTIONS: usize = 60;

/// Result of a separator search along fixed `mu1`.
#[derive(Clone, Debug)]
pub struct SeparatorResult {
    /// Located critical value (final bracket midpoint).
    pub mu2_critical: f64,
    /// Minimum distance, in `(v, A, s)`, between the recorded critical
    /// orbit and the mixed-mode saddle at `mu2_critical`.
    pub closest_approach: f64,
    /// Admissibility threshold for `closest_approach`: one part in a
    /// thousand of the saddle's distance from the origin.
    pub delta_sep: f64,
    /// Saddle coordinates `(v, A)` at `mu2_critical`.
    pub saddle: [f64; 2],
    /// Bracket after each refinement, starting with the input bracket.
    pub bracket_history: Vec<(f64, f64)>,
    /// Number of bisection steps taken.
    pub n_bisections: usize,
}

/// Encode an outcome for the bracketing error report: annihilation (the
/// expected low-side outcome) is `-1`, preservation (high side) `+1`,
/// anything else `0`.
fn outcome_code(o: Outcome) -> f64 {
    match o {
        Outcome::Annihilation => -1.0,
        Outcome::Preservation => 1.0,
        _ => 0.0,
    }
}

/// Locate the critical `mu2` where the protocol outcome along fixed
/// `mu1 < 0` switches from annihilation to preservation, by outcome
/// bisection on `[mu2_lo, mu2_hi]`.
///
/// Fails with `NoBracket` (endpoint outcomes encoded as in
/// [`outcome_code`]) unless the low endpoint classifies as annihilation and
/// the high endpoint as preservation, and with `NoRoot` if a mid-bracket
/// cell produces any other outcome (the slice then has more structure than
/// one separatrix crossing and bisection would silently pick a wrong
/// branch).
///
/// # Panics
///
/// If `mu1 >= 0` (no traveling pair, so no rebound to lose), the bracket is
/// not increasing, or either endpoint lies outside the model's validity
/// range.
pub fn find_mu2_critical(
    base: &ReducedParams,
    mu1: f64,
    mu2_lo: f64,
    mu2_hi: f64,
) -> Result<SeparatorResult, NumericsError> {
    assert!(mu1 < 0.0, "the separator lives at mu1 < 0, got {mu1}");
    assert!(
        mu1.abs() <= MAX_SWEEP_RADIUS,
        "mu1 = {mu1} outside the validity range"
    );
    assert!(mu2_lo < mu2_hi, "bracket must be increasing");
    assert!(
        mu2_lo.abs() <= MAX_SWEEP_RADIUS && mu2_hi.abs() <= MAX_SWEEP_RADIUS,
        "bracket outside the validity range"
    );

    let outcome_at = |mu2: f64| -> Result<Outcome, NumericsError> {
        Ok(classify(&base.with_mu(mu1, mu2))?.outcome)
    };

    let lo_out = outcome_at(mu2_lo)?;
    let hi_out = outcome_at(mu2_hi)?;
    if lo_out != Outcome::Annihilation || hi_out != Outcome::Preservation {
        return Err(NumericsError::NoBracket {
            a: mu2_lo,
            fa: outcome_code(lo_out),
            b: mu2_hi,
            fb: outcome_code(hi_out),
        });
    }

    let mut lo = mu2_lo;
    let mut hi = mu2_hi;
    let mut history = vec![(lo, hi)];
    let mut n = 0;
    while hi - lo > MU2_TOLERANCE && n < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        match outcome_at(mid)? {
            Outcome::Annihilation => lo = mid,
            Outcome::Preservation => hi = mid,
            other => {
                return Err(NumericsError::NoRoot {
                    why: format!(
                        "outcome {other} at mu2 = {mid:e} inside the separator \
                         bracket; the slice is not a single annihilation/\
                         preservation crossing"
                    ),
                })
            }
        }
        history.push((lo, hi));
        n += 1;
    }
    if hi - lo > MU2_TOLERANCE {
        return Err(NumericsError::NoConvergence {
            what: "separator bisection",
            iterations: n,
            residual: hi - lo,
        });
    }

    let mu2_critical = 0.5 * (lo + hi);
    let pc = base.with_mu(mu1, mu2_critical);
    let saddle = equilibria(&pc)
        .iter()
        .find(|e| e.label == EquilibriumLabel::Ep3Minus)
        .filter(|e| e.exists)
        .map(|e| [e.v, e.a])
        .ok_or_else(|| NumericsError::NoRoot {
            why: format!(
                "mixed-mode saddle absent at the located mu2_c = {mu2_critical:e}; \
                 the crossing cannot be a separatrix graze"
            ),
        })?;
    let delta_sep = 1e-3 * saddle[0].hypot(saddle[1]);

    let horizon =
        protocol_horizon(&pc).expect("mu1 < 0 guarantees a nonzero rate");
    let traj = integrate_reduced(&pc, protocol_initial_state(&pc), horizon, true)?;
    let closest_approach = traj
        .t
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let dv = traj.v[i] - saddle[0];
            let da = traj.a[i] - saddle[1];
            let ds = traj.s[i];
            (dv * dv + da * da + ds * ds).sqrt()
        })
        .fold(f64::INFINITY, f64::min);

    Ok(SeparatorResult {
        mu2_critical,
        closest_approach,
        delta_sep,
        saddle,
        bracket_history: history,
        n_bisections: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_slice_separator_is_located_and_grazes_the_saddle() {
        let base = ReducedParams::benchmark(0.0, 0.0);
        let mu1 = -1e-3;
        let lo = 0.05 * mu1; // the saddle's lower existence edge
        let res = find_mu2_critical(&base, mu1, lo, 1e-3).expect("separator");

        assert!(
            res.mu2_critical > 0.0 && res.mu2_critical < 1e-3,
            "mu2_c = {:e} outside the expected slice",
            res.mu2_critical
        );
        let (flo, fhi) = *res.bracket_history.last().unwrap();
        assert!(
            fhi - flo <= MU2_TOLERANCE,
            "final bracket width {:e}",
            fhi - flo
        );
        assert!(
            res.closest_approach < res.delta_sep,
            "closest approach {:e} exceeds the graze threshold {:e}",
            res.closest_approach,
            res.delta_sep
        );
        assert!(res.saddle[0] < 0.0 && res.saddle[1] > 0.0);

        let mut widths = res
            .bracket_history
            .iter()
            .map(|(a, b)| b - a)
            .collect::<Vec<_>>();
        let sorted = {
            let mut w = widths.clone();
            w.sort_by(|x, y| y.partial_cmp(x).unwrap());
            w
        };
        assert_eq!(widths, sorted, "bracket widths must shrink monotonically");
        widths.dedup();
        assert_eq!(
            widths.len(),
            res.n_bisections + 1,
            "every bisection must halve the bracket"
        );
    }

    #[test]
    fn agreeing_endpoints_are_reported_as_a_bracketing_failure() {
        let base = ReducedParams::benchmark(0.0, 0.0);
        match find_mu2_critical(&base, -1e-3, 8e-4, 1e-3) {
            Err(NumericsError::NoBracket { fa, fb, .. }) => {
                assert_eq!(fa, 1.0, "low endpoint already preserves");
                assert_eq!(fb, 1.0, "high endpoint preserves");
            }
            other => panic!("expected NoBracket, got {other:?}"),
        }
    }
}
