//! Collision-outcome classification for the reduced three-variable model.
//!
//! A single classification run integrates the symmetric head-on field
//! ([`rhs_symmetric`](super::rhs::rhs_symmetric)) from a slightly perturbed
//! traveling state and reports which attractor the orbit reaches:
//!
//! * **Standing** — the orbit converges to the rest state `(v, A) = (0, 0)`;
//!   the pulses stop and survive as a motionless pair.
//! * **Preservation** — the orbit converges to the reversed traveling state
//!   `(v, A) = (-v2, 0)` with the interaction exhausted (`s -> 0`); the pulses
//!   rebound and separate.
//! * **Annihilation** — the amplitude reaches the `|A| = 1` cutoff while the
//!   mixed-mode saddle pair exists.  The saddle's stable set is the basin
//!   boundary between rebound and blow-up, so hitting the cutoff there means
//!   the collision pushed the orbit across it: interaction-induced death.
//! * **Background** — the amplitude reaches the same cutoff but no mixed-mode
//!   saddle exists.  With no basin boundary to cross, the blow-up is the
//!   intrinsic amplitude instability of an isolated pulse; the pattern decays
//!   to the uniform state without needing a collision.
//! * **Undecided** — no terminal event fired within the time horizon, even
//!   after doubling it once, or the run was degenerate (`mu1 = mu2 = 0`,
//!   where every linear rate vanishes).
//!
//! # Why the interaction variable is integrated as `sigma = ln s`
//!
//! The interaction strength `s` spans hundreds of orders of magnitude in one
//! run (the protocol starts at `s = e^-50` and preservation is declared only
//! once `s < 1e-30`).  Integrated linearly, `s` drops below any absolute
//! tolerance and its *relative* accuracy — which sets the rebound time — is
//! destroyed.  In logarithmic form the tail dynamics `s' = 2*alpha*(v + M1*s)*s`
//! become near-linear drift `sigma' = 2*alpha*(v + M1*exp(sigma))`, which the
//! step controller resolves with large steps and full relative accuracy.
//!
//! An exactly-zero interaction (`s = 0`, the invariant single-pulse plane) has
//! no logarithm; it is represented by the finite sentinel
//! [`SIGMA_EXACT_ZERO`] = `-1e6`.  `exp(-1e6)` underflows to exactly `0.0`,
//! so the integrated field is bit-identical to the invariant-plane field,
//! while the sentinel stays finite so the dense-output interpolation used for
//! event location never produces `inf - inf`.  Drift over any admissible
//! horizon moves `sigma` by far less than the `~1e6` headroom.

use crate::numerics::rk45::{
    integrate, EventAction, EventDirection, EventSpec, OdeOptions,
};
use crate::numerics::NumericsError;

use super::equilibria::{equilibria, EquilibriumLabel};
use super::params::ReducedParams;

/// Convergence radius for arrival events: the orbit must come within this
/// distance (in the `(v, A)` plane) of the target state.  Small enough that
/// the linearization at the target is accurate to ~1e-12 there, large enough
/// that an exponentially contracting orbit reaches it in a few dozen e-folds.
pub const EPS_CONV: f64 = 1e-6;

/// Offset added to the starting velocity (and used for the starting
/// amplitude) by the standard protocol: large enough to dominate rounding in
/// the equilibrium coordinates, small enough to stay in the linear
/// neighborhood of the traveling state.
pub const PROTOCOL_OFFSET: f64 = 1e-3;

/// Protocol starting value of `sigma = ln s`: the pulses begin effectively
/// separated (`s = e^-50 ~ 2e-22`), yet `s` stays far above the underflow
/// threshold so the approach phase is resolved in full relative accuracy.
pub const PROTOCOL_SIGMA0: f64 = -50.0;

/// Finite stand-in for `ln 0` when a run starts exactly on the invariant
/// plane `s = 0`.  `exp` of this underflows to exactly `0.0` (see the module
/// docs for why the sentinel must be finite rather than `-inf`).
pub const SIGMA_EXACT_ZERO: f64 = -1.0e6;

/// `sigma` threshold below which the interaction is declared exhausted for
/// the preservation event: `s < 1e-30` is ~8 orders below the protocol start,
/// so a rebounding orbit has unambiguously separated.
fn sigma_preserved() -> f64 {
    -30.0 * std::f64::consts::LN_10
}

/// Terminal condition that ended (or failed to end) an integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TerminalEvent {
    /// The amplitude reached the `|A| = 1` validity cutoff.
    AmplitudeCutoff,
    /// The orbit arrived at the reversed traveling state `(-v2, 0)` with the
    /// interaction exhausted.
    ReachedTravelingPair,
    /// The orbit arrived at the rest state `(0, 0)`.
    ReachedOrigin,
    /// The step controller underflowed near a finite-time blow-up before the
    /// amplitude cutoff could be located; treated like the cutoff.
    StepUnderflow,
    /// The time horizon expired with no terminal event.
    HorizonEnd,
}

impl std::fmt::Display for TerminalEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TerminalEvent::AmplitudeCutoff => "amplitude-cutoff",
            TerminalEvent::ReachedTravelingPair => "reached-traveling-pair",
            TerminalEvent::ReachedOrigin => "reached-origin",
            TerminalEvent::StepUnderflow => "step-underflow",
            TerminalEvent::HorizonEnd => "horizon-end",
        })
    }
}

/// Collision outcome label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Both pulses stop: the orbit reached the rest state.
    Standing,
    /// Both pulses survive and separate: the orbit reached the reversed
    /// traveling state.
    Preservation,
    /// The collision drove the amplitude across the mixed-mode basin
    /// boundary to blow-up: both pulses die.
    Annihilation,
    /// The amplitude blew up with no basin boundary present: the isolated
    /// pulse was already unstable and decays to the uniform background.
    Background,
    /// No terminal event within the (doubled) horizon, or degenerate
    /// parameters.
    Undecided,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Outcome::Standing => "standing",
            Outcome::Preservation => "preservation",
            Outcome::Annihilation => "annihilation",
            Outcome::Background => "background",
            Outcome::Undecided => "undecided",
        })
    }
}

/// One downward crossing of `v + M1*s = 0`: the instant the pulses' approach
/// stalls and reverses.  `s` is maximal here (`s' = 2*alpha*(v + M1*s)*s`
/// vanishes exactly at the crossing), so this records the closest encounter.
#[derive(Clone, Copy, Debug)]
pub struct ReboundRecord {
    /// Time of the crossing.
    pub t: f64,
    /// Velocity at the crossing (negative: `v = -M1*s` there for `M1 > 0`).
    pub v: f64,
    /// Interaction strength at the crossing — the strongest the pulses felt
    /// each other.
    pub s: f64,
}

/// Recorded orbit of one reduced-model integration.
///
/// Column vectors share one index; `s` and `h` are derived from the
/// integrated `sigma = ln s` (`s = exp(sigma)`, `h = -sigma / alpha` is the
/// equivalent pulse separation for tail rate `alpha`).  A run started exactly
/// on the invariant plane `s = 0` carries the sentinel `sigma = -1e6` and so
/// reports `s = 0` and a sentinel-large `h`.
#[derive(Clone, Debug)]
pub struct ReducedTrajectory {
    /// Sample times.
    pub t: Vec<f64>,
    /// Velocity asymmetry at each sample.
    pub v: Vec<f64>,
    /// Oscillation amplitude at each sample.
    pub a: Vec<f64>,
    /// Interaction strength at each sample.
    pub s: Vec<f64>,
    /// Equivalent separation `-ln(s) / alpha` at each sample.
    pub h: Vec<f64>,
    /// Time at which the run ended.
    pub t_final: f64,
    /// State `(v, A, s)` at `t_final`.
    pub final_state: [f64; 3],
    /// What ended the run.
    pub terminal: TerminalEvent,
    /// Every rebound crossing, in time order.
    pub rebounds: Vec<ReboundRecord>,
    /// Accepted integrator steps.
    pub n_accepted: usize,
}

/// Result of a classification run.
#[derive(Clone, Debug)]
pub struct ClassifiedRun {
    /// The outcome label.
    pub outcome: Outcome,
    /// The terminal event that produced the label, `None` only for the
    /// degenerate `mu1 = mu2 = 0` case that is never integrated.
    pub terminal: Option<TerminalEvent>,
    /// Time at which the terminal event fired (`NaN` after a step
    /// underflow, whose exact time is not recoverable).
    pub t_final: f64,
    /// The horizon actually used (after any doubling).
    pub horizon: f64,
    /// Whether the horizon had to be doubled once.
    pub horizon_doubled: bool,
    /// The first rebound crossing, if any occurred.
    pub rebound: Option<ReboundRecord>,
    /// Accepted integrator steps in the final attempt.
    pub n_steps: usize,
}

/// Standard perturbed-traveling initial state `(v0, A0, s0)`:
/// `v0 = v2 + 1e-3` when the traveling pair exists (`mu1 < 0`), else `1e-3`;
/// `A0 = 1e-3`; `s0 = e^-50`.
pub fn protocol_initial_state(p: &ReducedParams) -> [f64; 3] {
    let v0 = if p.mu1 < 0.0 {
        (-p.mu1 / p.p11).sqrt() + PROTOCOL_OFFSET
    } else {
        PROTOCOL_OFFSET
    };
    [v0, PROTOCOL_OFFSET, PROTOCOL_SIGMA0.exp()]
}

/// Integrate the symmetric reduced field from `(v0, A0, s0)` for `t_end`
/// time units, watching for the terminal events described in the module
/// docs and recording every rebound crossing.
///
/// `record` enables dense storage of the orbit (every accepted step); the
/// terminal bookkeeping is identical either way.  Fails with the underlying
/// integrator error on step underflow (callers that want divergence
/// semantics for underflow should go through [`classify_from`]).
///
/// # Panics
///
/// If `s0 < 0`, or `t_end` is not strictly positive and finite.
pub fn integrate_reduced(
    p: &ReducedParams,
    x0: [f64; 3],
    t_end: f64,
    record: bool,
) -> Result<ReducedTrajectory, NumericsError> {
    assert!(x0[2] >= 0.0, "interaction strength must be nonnegative, got {}", x0[2]);
    assert!(
        t_end > 0.0 && t_end.is_finite(),
        "integration span must be positive and finite, got {t_end}"
    );

    let sigma0 = if x0[2] == 0.0 { SIGMA_EXACT_ZERO } else { x0[2].ln() };
    let y0 = [x0[0], x0[1], sigma0];

    let pp = *p;
    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let v = y[0];
        let a = y[1];
        let s = y[2].exp();
        dy[0] = (-pp.mu1 - pp.p11 * v * v + pp.p12 * a * a) * v - pp.m2 * s;
        dy[1] = (-pp.mu2 - pp.p21 * v * v + pp.p22 * a * a) * a + pp.m3 * s;
        dy[2] = 2.0 * pp.alpha * (v + pp.m1 * s);
    };

    let g_cutoff = |_t: f64, y: &[f64]| y[1].abs() - 1.0;
    let g_origin = |_t: f64, y: &[f64]| EPS_CONV - y[0].hypot(y[1]);
    let v2 = if pp.mu1 < 0.0 { (-pp.mu1 / pp.p11).sqrt() } else { 0.0 };
    let sig_cut = sigma_preserved();
    let g_pair = move |_t: f64, y: &[f64]| {
        // Both conditions must hold: close to (-v2, 0) AND interaction
        // exhausted.  min(...) crosses upward only when the later one does.
        let d = (y[0] + v2).hypot(y[1]);
        (EPS_CONV - d).min(sig_cut - y[2])
    };
    let g_rebound = move |_t: f64, y: &[f64]| y[0] + pp.m1 * y[2].exp();

    let mut specs: Vec<EventSpec<'_>> = Vec::new();
    let mut stop_tag: Vec<Option<TerminalEvent>> = Vec::new();
    specs.push(EventSpec {
        name: "amplitude-cutoff",
        g: &g_cutoff,
        direction: EventDirection::Upward,
        action: EventAction::Stop,
    });
    stop_tag.push(Some(TerminalEvent::AmplitudeCutoff));
    specs.push(EventSpec {
        name: "arrival-origin",
        g: &g_origin,
        direction: EventDirection::Upward,
        action: EventAction::Stop,
    });
    stop_tag.push(Some(TerminalEvent::ReachedOrigin));
    if pp.mu1 < 0.0 {
        specs.push(EventSpec {
            name: "arrival-traveling-pair",
            g: &g_pair,
            direction: EventDirection::Upward,
            action: EventAction::Stop,
        });
        stop_tag.push(Some(TerminalEvent::ReachedTravelingPair));
    }
    specs.push(EventSpec {
        name: "rebound",
        g: &g_rebound,
        direction: EventDirection::Downward,
        action: EventAction::Record,
    });
    stop_tag.push(None);

    let opts = OdeOptions {
        record_every: if record { 1 } else { 0 },
        ..OdeOptions::default()
    };
    let sol = integrate(&rhs, 0.0, &y0, t_end, &opts, &specs)?;

    let terminal = match sol.stopped_by {
        Some(i) => stop_tag[i].expect("record-only events cannot stop the run"),
        None => TerminalEvent::HorizonEnd,
    };
    let rebounds: Vec<ReboundRecord> = sol
        .events
        .iter()
        .filter(|hit| hit.name == "rebound")
        .map(|hit| ReboundRecord {
            t: hit.t,
            v: hit.y[0],
            s: hit.y[2].exp(),
        })
        .collect();

    let n = sol.t.len();
    let mut v = Vec::with_capacity(n);
    let mut a = Vec::with_capacity(n);
    let mut s = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for y in &sol.y {
        v.push(y[0]);
        a.push(y[1]);
        s.push(y[2].exp());
        h.push(-y[2] / pp.alpha);
    }

    Ok(ReducedTrajectory {
        t: sol.t,
        v,
        a,
        s,
        h,
        t_final: sol.t_final,
        final_state: [sol.y_final[0], sol.y_final[1], sol.y_final[2].exp()],
        terminal,
        rebounds,
        n_accepted: sol.n_accepted,
    })
}

/// Smallest nonzero linear rate among `|mu1|, |mu2|`, or `None` when both
/// vanish.
fn smallest_nonzero_rate(p: &ReducedParams) -> Option<f64> {
    let rates = [p.mu1.abs(), p.mu2.abs()];
    rates
        .into_iter()
        .filter(|r| *r > 0.0)
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |m| m.min(r)))
        })
}

/// Sort a divergence terminal (amplitude cutoff or step underflow) into
/// annihilation or background by whether the mixed-mode saddle pair exists.
fn divergence_outcome(p: &ReducedParams) -> Outcome {
    let has_saddle = equilibria(p)
        .iter()
        .find(|e| e.label == EquilibriumLabel::Ep3Minus)
        .map(|e| e.exists)
        .unwrap_or(false);
    if has_saddle {
        Outcome::Annihilation
    } else {
        Outcome::Background
    }
}

/// Classification time horizon for these parameters:
/// `50 / min_nonzero(|mu1|, |mu2|)` — fifty e-folds of the slowest linear
/// rate in play — plus a transit allowance `60 / (2*alpha*v2)` for the
/// approach/rebound/escape excursion when the traveling pair exists.
/// `None` when both unfolding rates vanish (nothing converges).
pub fn protocol_horizon(p: &ReducedParams) -> Option<f64> {
    let rate = smallest_nonzero_rate(p)?;
    let mut horizon = 50.0 / rate;
    if p.mu1 < 0.0 {
        horizon += 60.0 / (2.0 * p.alpha * (-p.mu1 / p.p11).sqrt());
    }
    Some(horizon)
}

/// Classify a head-on collision from an arbitrary start `(v0, A0, s0)`.
///
/// The horizon comes from [`protocol_horizon`]; a run that reaches it
/// silently is retried once with double the span before being declared
/// [`Outcome::Undecided`].
pub fn classify_from(
    p: &ReducedParams,
    x0: [f64; 3],
) -> Result<ClassifiedRun, NumericsError> {
    let Some(mut horizon) = protocol_horizon(p) else {
        return Ok(ClassifiedRun {
            outcome: Outcome::Undecided,
            terminal: None,
            t_final: 0.0,
            horizon: 0.0,
            horizon_doubled: false,
            rebound: None,
            n_steps: 0,
        });
    };

    let mut doubled = false;
    loop {
        match integrate_reduced(p, x0, horizon, false) {
            Ok(traj) => {
                if traj.terminal == TerminalEvent::HorizonEnd && !doubled {
                    doubled = true;
                    horizon *= 2.0;
                    continue;
                }
                let outcome = match traj.terminal {
                    TerminalEvent::ReachedOrigin => Outcome::Standing,
                    TerminalEvent::ReachedTravelingPair => Outcome::Preservation,
                    TerminalEvent::AmplitudeCutoff | TerminalEvent::StepUnderflow => {
                        divergence_outcome(p)
                    }
                    TerminalEvent::HorizonEnd => Outcome::Undecided,
                };
                return Ok(ClassifiedRun {
                    outcome,
                    terminal: Some(traj.terminal),
                    t_final: traj.t_final,
                    horizon,
                    horizon_doubled: doubled,
                    rebound: traj.rebounds.first().copied(),
                    n_steps: traj.n_accepted,
                });
            }
            Err(NumericsError::NoConvergence {
                what: "step-size control (underflow)",
                iterations,
                ..
            }) => {
                // A blow-up outran the cutoff event; same divergence label.
                return Ok(ClassifiedRun {
                    outcome: divergence_outcome(p),
                    terminal: Some(TerminalEvent::StepUnderflow),
                    t_final: f64::NAN,
                    horizon,
                    horizon_doubled: doubled,
                    rebound: None,
                    n_steps: iterations,
                });
            }
            Err(e) => return Err(e),
        }
    }
}

/// Classify a head-on collision from the standard protocol start
/// ([`protocol_initial_state`]).
pub fn classify(p: &ReducedParams) -> Result<ClassifiedRun, NumericsError> {
    classify_from(p, protocol_initial_state(p))
}
