//! Direct time integration of perturbed profiles — the nonlinear check on
//! every linear prediction in this crate.
//!
//! [`perturb_and_evolve`] adds a chosen (real) mode to a solved profile and
//! integrates the full PDE, recording the peak excursion and pulse position
//! over time.  Because the steady solver and the time stepper discretize
//! space identically, an unperturbed profile is a fixed point of the stepper
//! up to the Newton residual — so everything the record shows is genuine
//! dynamics, not discretization mismatch.
//!
//! [`oscillation_frequency`] turns a recorded peak series into a frequency
//! estimate by averaging the spacing of its local maxima, which is how the
//! linear oscillation frequency `ω` of the spectrum module is validated
//! against the nonlinear evolution.

use super::operator::N_COMP;
use super::profile::PulseProfile;
use crate::grid::{Field1, ImexStepper1};
use crate::models::ModelSpec;

/// Fraction of the initial pulse amplitude below which the field counts as
/// extinguished.  Extinction in these models is an all-or-nothing collapse
/// to the homogeneous background: once the excursion drops below a few
/// percent it never recovers, so 5 % cleanly separates "pulse shrank
/// transiently" from "pulse is gone".
pub const EXTINCTION_FRACTION: f64 = 0.05;

/// What became of the perturbed pulse within the integration horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fate {
    /// Still a localized excursion at the final time.
    Persisted,
    /// Collapsed onto the background at the recorded time.
    Extinct { t: f64 },
}

/// Time series of a perturbed-profile run.
#[derive(Clone, Debug)]
pub struct EvolveRecord {
    pub times: Vec<f64>,
    /// Peak `u` excursion above background at each sample.
    pub peak: Vec<f64>,
    /// Amplitude-weighted pulse position at each sample.
    pub position: Vec<f64>,
    pub fate: Fate,
    pub dt: f64,
    /// Field state at the end of the run (extinct or not).
    pub final_state: Field1,
}

/// Integrate `profile + amplitude · mode` for `t_end` model-time units,
/// sampling every `record_every` steps.  `mode` is a natural-layout real
/// vector (e.g. the real part of an eigenmode); `amplitude = 0` recovers the
/// plain stability run of the profile itself.
pub fn perturb_and_evolve<M: ModelSpec>(
    model: &M,
    profile: &PulseProfile,
    mode: &[f64],
    amplitude: f64,
    t_end: f64,
    dt: f64,
    record_every: usize,
) -> EvolveRecord {
    let grid = profile.grid;
    let n = grid.n;
    assert_eq!(mode.len(), N_COMP * n, "mode must be a natural-layout vector");
    assert!(dt > 0.0 && t_end > 0.0);

    let mut field = profile.state.clone();
    for (k, slot) in field.as_mut_slice().iter_mut().enumerate() {
        *slot += amplitude * mode[k];
    }

    let bg_u = profile.background[0];
    let initial_amp = profile.amplitude();
    let threshold = EXTINCTION_FRACTION * initial_amp;

    let peak_of = |f: &Field1| -> f64 {
        f.comp(0).iter().fold(0.0f64, |m, &u| m.max(u - bg_u))
    };
    let position_of = |f: &Field1| -> f64 {
        let mut mass = 0.0;
        let mut moment = 0.0;
        for (i, &u) in f.comp(0).iter().enumerate() {
            let e = (u - bg_u).max(0.0);
            mass += e;
            moment += e * grid.x(i);
        }
        if mass > 0.0 {
            moment / mass
        } else {
            0.5 * grid.length()
        }
    };

    let steps = (t_end / dt).round() as usize;
    let every = record_every.max(1);
    let mut times = vec![0.0];
    let mut peak = vec![peak_of(&field)];
    let mut position = vec![position_of(&field)];
    let mut fate = Fate::Persisted;

    let stepper = ImexStepper1::new(grid, model, dt);
    stepper.evolve(&mut field, steps, every, &mut |s, f| {
        let t = s as f64 * dt;
        let p = peak_of(f);
        times.push(t);
        peak.push(p);
        position.push(position_of(f));
        if p < threshold {
            fate = Fate::Extinct { t };
            return false;
        }
        true
    });

    EvolveRecord {
        times,
        peak,
        position,
        fate,
        dt,
        final_state: field,
    }
}

/// Frequency of the peak-series oscillation from the mean spacing of local
/// maxima at `t ≥ t_from`; `None` with fewer than two maxima.  Angular
/// frequency (`2π / period`), to compare directly with `Im λ` of the
/// oscillatory pair.
pub fn oscillation_frequency(record: &EvolveRecord, t_from: f64) -> Option<f64> {
    let mut maxima = Vec::new();
    for k in 1..record.times.len().saturating_sub(1) {
        if record.times[k] < t_from {
            continue;
        }
        if record.peak[k] > record.peak[k - 1] && record.peak[k] >= record.peak[k + 1] {
            maxima.push(record.times[k]);
        }
    }
    if maxima.len() < 2 {
        return None;
    }
    let period =
        (maxima[maxima.len() - 1] - maxima[0]) / (maxima.len() - 1) as f64;
    Some(std::f64::consts::TAU / period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1;
    use crate::models::Fhn3;
    use crate::pulse::profile::standing_pulse_from_bump;
    use crate::pulse::spectrum::leading_spectrum;

    fn stable_pulse() -> (Fhn3, PulseProfile) {
        let model = Fhn3::baseline(3.0, 1200.0);
        let grid = Grid1::periodic(0.25, 500);
        let pulse = standing_pulse_from_bump(&model, &grid, 0.125, 2.0, 0.02)
            .expect("standing pulse");
        (model, pulse)
    }

    /// The solved profile must be a fixed point of the stepper: with zero
    /// perturbation the peak may drift only by the accumulated Newton
    /// residual, many orders below any physical signal.
    #[test]
    fn unperturbed_profile_is_a_fixed_point_of_the_stepper() {
        let (model, pulse) = stable_pulse();
        let zero = vec![0.0; 3 * pulse.grid.n];
        let rec = perturb_and_evolve(&model, &pulse, &zero, 0.0, 5.0, 1e-3, 500);
        assert_eq!(rec.fate, Fate::Persisted);
        let p0 = rec.peak[0];
        let drift = rec
            .peak
            .iter()
            .fold(0.0f64, |m, &p| m.max((p - p0).abs()));
        assert!(
            drift < 1e-6,
            "peak drifted by {drift:.3e} over 5 time units without a perturbation"
        );
    }

    /// Kicking the stable pulse with its own (damped) oscillatory mode must
    /// produce a decaying oscillation whose frequency matches Im λ of the
    /// pair within 5 % — the loop-closing check between the eigensolver and
    /// the nonlinear dynamics.
    #[test]
    fn measured_oscillation_frequency_matches_the_eigenvalue() {
        let (model, pulse) = stable_pulse();
        let s = leading_spectrum(&model, &pulse, None).expect("spectrum");
        let h = s.hopf.expect("oscillatory pair at this parameter point");
        let mode: Vec<f64> = h.mode.iter().map(|z| z.re).collect();
        // The mode has unit *weighted* norm, which concentrates order-10²
        // pointwise values on the steep front; scale the kick by the
        // pointwise max so it stays a 2 % perturbation of the pulse, inside
        // the linear regime the eigenvalue describes.
        let mode_max = mode.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        let kick = 0.02 * pulse.amplitude() / mode_max;

        // ≈ 5 oscillation periods; sample densely enough that peak-picking
        // resolves each maximum (period ≈ 33 time units, samples every 0.1).
        let t_end = 5.0 * std::f64::consts::TAU / h.omega;
        let rec = perturb_and_evolve(&model, &pulse, &mode, kick, t_end, 1e-3, 100);
        assert_eq!(rec.fate, Fate::Persisted, "a damped kick must not kill the pulse");

        let omega = oscillation_frequency(&rec, 0.0).expect("oscillating record");
        let rel = (omega - h.omega).abs() / h.omega;
        assert!(
            rel < 0.05,
            "measured ω = {omega:.4} vs eigenvalue ω = {:.4} (rel err {rel:.3})",
            h.omega
        );

        // Stable side: the oscillation envelope must decay.
        let mid = rec.peak.len() / 2;
        let early = rec.peak[..mid].iter().cloned().fold(0.0f64, f64::max);
        let late = rec.peak[mid..].iter().cloned().fold(0.0f64, f64::max);
        assert!(
            late < early,
            "envelope grew ({early:.6} → {late:.6}) although Re λ = {:.3e} < 0",
            h.lambda.re
        );
    }
}
