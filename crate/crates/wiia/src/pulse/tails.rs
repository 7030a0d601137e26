//! Exponential tail measurement for pulse profiles and their adjoint modes.
//!
//! Away from its core a pulse relaxes onto the background along the slowest
//! spatial mode of the background linearization, so every component decays
//! like `a_c · e^{−α (x − x₀)}` with one shared rate `α` and per-component
//! signed amplitudes `a_c`.  The interaction constants are algebraic in
//! `(α, a, a*, b*)`, which makes this module the measurement bridge between
//! solved profiles and the reduced dynamics.
//!
//! The fitting protocol:
//!
//! 1. The window starts three halfwidths beyond the core (the halfwidth is
//!    the largest excursion distance at 10 % of the pulse amplitude) and
//!    ends at 90 % of the remaining distance to the wall, keeping both the
//!    core crossover and the wall's image contribution out of the data.
//! 2. Each component is fitted with a *free* rate first.  A fit qualifies
//!    only with `R² ≥ 0.999`; the shared rate `α` is the smallest qualifying
//!    rate (the slowest decay dominates every tail sum).  If no component
//!    qualifies the data is simply not exponential on the window —
//!    [`PulseError::TailNotExponential`] instead of a number.
//! 3. Amplitudes are then re-extracted at the shared rate: log-space least
//!    squares for monotone tails, and a linear-space projection for the
//!    oscillatory adjoint component, whose phase convention can lawfully put
//!    sign changes inside the window.
//!
//! The adjoint variant measures the transpose-kernel mode and the real part
//! of the left oscillatory mode at the *same* `α`: the transposed far field
//! is governed by the transposed (identical) dispersion relation, so rate
//! agreement between the two fits is a genuine cross-check of the whole
//! linearization, not a tautology.

use super::operator::N_COMP;
use super::profile::PulseProfile;
use super::spectrum::SpectralData;
use super::PulseError;
use crate::grid::Boundary;
use crate::numerics::{fit_exp_amplitude_fixed_rate, fit_exp_tail};

/// R² gate for a tail window to count as exponential.  Pure exponentials
/// with our grid resolutions come out at 1 − 1e-9 or better; anything below
/// this gate means core crossover, wall images, or floor noise dominate.
pub const R2_GATE: f64 = 0.999;

/// Excursion fraction that defines the pulse halfwidth.
const HALFWIDTH_LEVEL: f64 = 0.1;

/// Window start in halfwidths beyond the center.
const WINDOW_START_HALFWIDTHS: f64 = 3.0;

/// Fraction of the remaining run to the wall kept inside the window.
const WINDOW_END_FRACTION: f64 = 0.9;

/// Relative magnitude floor: samples below this fraction of the component's
/// own excursion scale are roundoff, not tail.
const FLOOR_FRACTION: f64 = 1e-12;

/// Measured tail structure of a pulse profile.
#[derive(Clone, Debug)]
pub struct PulseTails {
    /// Shared decay rate: the slowest qualifying per-component free rate.
    pub alpha: f64,
    /// Signed amplitudes per component at the shared rate, in the
    /// `x′ = x − x₀` convention (value extrapolated to the pulse center).
    pub amplitudes: [f64; 3],
    /// R² of the rate-defining component's free fit.
    pub r2: f64,
    /// Which component defined the shared rate.
    pub rate_component: usize,
    /// Free rates and R² per component (`NaN` where a fit was impossible).
    pub component_rates: [f64; 3],
    pub component_r2: [f64; 3],
    /// Fitted window in grid coordinates.
    pub window: (f64, f64),
    /// Relative left/right rate disagreement for symmetric profiles.
    pub side_asymmetry: Option<f64>,
    pub n_samples: usize,
}

/// Tail structure of the adjoint modes, at the pulse's own decay rate.
#[derive(Clone, Debug)]
pub struct AdjointTails {
    /// Free rate of the slowest transpose-kernel component — the
    /// consistency partner of [`PulseTails::alpha`].
    pub alpha_adjoint: f64,
    /// R² of that free fit.
    pub r2: f64,
    /// Signed amplitudes of the transpose-kernel mode at the pulse rate.
    pub kernel_amplitudes: [f64; 3],
    /// Signed amplitudes of Re (left oscillatory mode) at the pulse rate,
    /// when an oscillatory pair exists.
    pub oscillatory_amplitudes: Option<[f64; 3]>,
    pub window: (f64, f64),
}

/// Right-side fit window for a profile: `(x_lo, x_hi)` in grid coordinates.
fn default_window(p: &PulseProfile) -> (f64, f64) {
    let bg = p.background[0];
    let amp = p.amplitude();
    let x0 = p.center;
    let mut halfwidth = 0.0f64;
    for (i, &u) in p.state.comp(0).iter().enumerate() {
        if (u - bg).abs() >= HALFWIDTH_LEVEL * amp {
            halfwidth = halfwidth.max((p.grid.x(i) - x0).abs());
        }
    }
    let x_lo = x0 + WINDOW_START_HALFWIDTHS * halfwidth;
    let run = match p.grid.bc {
        Boundary::Neumann => p.grid.length() - x0,
        // On a ring the images of the pulse sit one period away in both
        // directions; half the circumference is the contamination-free run.
        Boundary::Periodic => 0.5 * p.grid.length(),
    };
    let x_hi = x0 + WINDOW_END_FRACTION * run;
    (x_lo, x_hi)
}

/// Nodes inside the window, as (x′ = x − x₀, node index).
fn window_nodes(p: &PulseProfile, window: (f64, f64)) -> (Vec<f64>, Vec<usize>) {
    let mut xs = Vec::new();
    let mut idx = Vec::new();
    for i in 0..p.grid.n {
        let x = p.grid.x(i);
        if x >= window.0 && x <= window.1 {
            xs.push(x - p.center);
            idx.push(i);
        }
    }
    (xs, idx)
}

/// Linear-space amplitude projection at a fixed rate:
/// `a = Σ f e^{−αx} / Σ e^{−2αx}`.  Unlike the log-space fit it tolerates
/// sign changes in the data, which the oscillatory adjoint tail can have.
fn project_amplitude(xs: &[f64], f: &[f64], rate: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&x, &v) in xs.iter().zip(f) {
        let e = (-rate * x).exp();
        num += v * e;
        den += e * e;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

struct ComponentData {
    xs: Vec<f64>,
    values: [Vec<f64>; 3],
    scales: [f64; 3],
}

/// Collect window samples of a natural-layout vector field relative to a
/// per-component baseline.
fn collect(
    p: &PulseProfile,
    window: (f64, f64),
    field: &[f64],
    baseline: [f64; 3],
) -> Result<ComponentData, PulseError> {
    let n = p.grid.n;
    let (xs, idx) = window_nodes(p, window);
    if xs.len() < 8 {
        return Err(PulseError::TailNotExponential {
            r2: 0.0,
            needed: R2_GATE,
            context: format!(
                "window ({:.4}, {:.4}) holds only {} grid nodes",
                window.0,
                window.1,
                xs.len()
            ),
        });
    }
    let mut values: [Vec<f64>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let mut scales = [0.0f64; 3];
    for c in 0..N_COMP {
        for k in 0..n {
            scales[c] = scales[c].max((field[c * n + k] - baseline[c]).abs());
        }
        values[c] = idx.iter().map(|&i| field[c * n + i]).collect();
    }
    Ok(ComponentData { xs, values, scales })
}

/// Fit the tail of a solved profile.  `window` overrides the default
/// core-excluding window; passing one that overlaps the core is the
/// documented way to get [`PulseError::TailNotExponential`] on purpose.
pub fn tail_fit(p: &PulseProfile, window: Option<(f64, f64)>) -> Result<PulseTails, PulseError> {
    let window = window.unwrap_or_else(|| default_window(p));
    let data = collect(p, window, p.state.as_slice(), p.background)?;

    let mut rates = [f64::NAN; 3];
    let mut r2s = [f64::NAN; 3];
    let mut best_r2 = 0.0f64;
    let mut chosen: Option<usize> = None;
    for c in 0..N_COMP {
        let floor = FLOOR_FRACTION * data.scales[c];
        match fit_exp_tail(&data.xs, &data.values[c], p.background[c], floor) {
            Ok(fit) => {
                rates[c] = fit.rate;
                r2s[c] = fit.r2;
                best_r2 = best_r2.max(fit.r2);
                if fit.r2 >= R2_GATE && fit.rate > 0.0 {
                    let better = match chosen {
                        None => true,
                        Some(prev) => fit.rate < rates[prev],
                    };
                    if better {
                        chosen = Some(c);
                    }
                }
            }
            Err(_) => {
                // Component never rises above its floor in the window (e.g.
                // an identically-background component); it cannot define the
                // rate and gets amplitude 0 below.
            }
        }
    }
    let rate_component = chosen.ok_or_else(|| PulseError::TailNotExponential {
        r2: best_r2,
        needed: R2_GATE,
        context: format!(
            "no component is exponential on ({:.4}, {:.4})",
            window.0, window.1
        ),
    })?;
    let alpha = rates[rate_component];

    let mut amplitudes = [0.0f64; 3];
    for c in 0..N_COMP {
        let floor = FLOOR_FRACTION * data.scales[c];
        amplitudes[c] =
            fit_exp_amplitude_fixed_rate(&data.xs, &data.values[c], p.background[c], alpha, floor)
                .unwrap_or(0.0);
    }

    // Left/right rate agreement, meaningful for symmetric profiles: mirror
    // the window through the center and refit the defining component.
    let side_asymmetry = if p.symmetric {
        let mirrored = (2.0 * p.center - window.1, 2.0 * p.center - window.0);
        let (xs_l, idx_l) = window_nodes(p, mirrored);
        if xs_l.len() >= 8 {
            let c = rate_component;
            let f: Vec<f64> = idx_l
                .iter()
                .map(|&i| p.state.comp(c)[i])
                .collect();
            // Flip the coordinate so the tail again decays with growing x′.
            let xs_flipped: Vec<f64> = xs_l.iter().map(|&x| -x).collect();
            let floor = FLOOR_FRACTION * data.scales[c];
            fit_exp_tail(&xs_flipped, &f, p.background[c], floor)
                .ok()
                .filter(|fit| fit.r2 >= R2_GATE)
                .map(|fit| (fit.rate - alpha).abs() / alpha)
        } else {
            None
        }
    } else {
        None
    };

    Ok(PulseTails {
        alpha,
        amplitudes,
        r2: r2s[rate_component],
        rate_component,
        component_rates: rates,
        component_r2: r2s,
        window,
        side_asymmetry,
        n_samples: data.xs.len(),
    })
}

/// Fit the adjoint tails: the transpose-kernel mode with a free rate (the
/// consistency check against the profile's own `α`) and both adjoint
/// amplitude vectors at the pulse rate `alpha`.
pub fn adjoint_tail_fit(
    p: &PulseProfile,
    spectral: &SpectralData,
    alpha: f64,
    window: Option<(f64, f64)>,
) -> Result<AdjointTails, PulseError> {
    let window = window.unwrap_or_else(|| default_window(p));
    let data = collect(p, window, &spectral.adjoint_translation, [0.0; 3])?;

    // Free rate of the slowest qualifying transpose-kernel component.
    let mut best: Option<(f64, f64)> = None;
    for c in 0..N_COMP {
        let floor = FLOOR_FRACTION * data.scales[c];
        if let Ok(fit) = fit_exp_tail(&data.xs, &data.values[c], 0.0, floor) {
            if fit.r2 >= R2_GATE && fit.rate > 0.0 {
                let better = best.map_or(true, |(r, _)| fit.rate < r);
                if better {
                    best = Some((fit.rate, fit.r2));
                }
            }
        }
    }
    let (alpha_adjoint, r2) = best.ok_or_else(|| PulseError::TailNotExponential {
        r2: 0.0,
        needed: R2_GATE,
        context: "no transpose-kernel component is exponential on the window".into(),
    })?;

    let mut kernel_amplitudes = [0.0f64; 3];
    for c in 0..N_COMP {
        let floor = FLOOR_FRACTION * data.scales[c];
        kernel_amplitudes[c] =
            fit_exp_amplitude_fixed_rate(&data.xs, &data.values[c], 0.0, alpha, floor)
                .unwrap_or(0.0);
    }

    let oscillatory_amplitudes = spectral.hopf.as_ref().map(|h| {
        let n = p.grid.n;
        let re: Vec<f64> = h.adjoint.iter().map(|z| z.re).collect();
        let (_, idx) = window_nodes(p, window);
        let mut amps = [0.0f64; 3];
        for c in 0..N_COMP {
            let f: Vec<f64> = idx.iter().map(|&i| re[c * n + i]).collect();
            // Linear-space projection: the oscillatory phase convention can
            // put sign changes in this tail, which a log fit cannot absorb.
            amps[c] = project_amplitude(&data.xs, &f, alpha);
        }
        amps
    });

    Ok(AdjointTails {
        alpha_adjoint,
        r2,
        kernel_amplitudes,
        oscillatory_amplitudes,
        window,
    })
}
