//! Newton solvers for standing and traveling pulse profiles.
//!
//! Both solvers work on the comoving steady equation assembled by
//! [`super::operator`].  The linear systems they factor are singular exactly
//! at the translation symmetry, so each solve is *bordered*:
//!
//! * **Standing pulses** keep the state as the only unknown and remove the
//!   translation direction with a centroid pin — the first moment of
//!   `u − u_bg` about a fixed station must vanish.  The pin is linear in the
//!   state, so it is enforced exactly from the first Newton step on, and the
//!   slack variable paired with it converges to zero together with the
//!   residual.
//! * **Traveling pulses** treat the speed `c` as an extra unknown and instead
//!   impose an integral phase condition against the initial guess,
//!   `⟨U − U_ref, ∂_z U_ref⟩_w = 0`, which selects one representative from
//!   the family of translates and makes the extended Jacobian square.
//!
//! Convergence is judged on the max-norm of the *physical* residual
//! `D S_zz + c T S_z + F(S)` (tolerance `1e-10`); the diffusion rows carry
//! stiff `D/dx²` entries, so this is a demanding absolute scale.  A solve
//! that converges but has lost its bump (amplitude below
//! [`UNIFORM_AMPLITUDE_FLOOR`]) is reported as
//! [`PulseError::ConvergedToUniform`] rather than returned, because every
//! homogeneous equilibrium also solves the steady equation.

use super::operator::{
    inner, node_weight, parity_defects, state_derivative, steady_jacobian, steady_residual,
    FoldOrder, N_COMP,
};
use super::PulseError;
use crate::grid::{Field1, Grid1, ImexStepper1};
use crate::models::ModelSpec;
use crate::numerics::{newton_solve, solve_bordered, BorderedSystem, NewtonOptions, NumericsError};

/// A converged pulse amplitude below this value (in units of the `u`
/// component's departure from background) means the iteration landed on the
/// uniform state: genuine pulses in the models treated here have order-one
/// amplitude, while Newton creep from a dying guess ends orders of magnitude
/// lower.
pub const UNIFORM_AMPLITUDE_FLOOR: f64 = 0.1;

/// Speeds below this are reported as standing.  The Newton tolerance `1e-10`
/// on the residual bounds the speed error far tighter than this; the floor
/// only has to separate "numerically zero" from the slow drifting speeds
/// (order `1e-3` and up) that occur past a parity-breaking transition.
pub const STANDING_SPEED_FLOOR: f64 = 1e-7;

/// Even-parity defect below which a centered profile is flagged symmetric.
/// A symmetric solve on a symmetric grid reproduces reflection to rounding
/// noise amplified by the Jacobian conditioning, comfortably below this.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Newton iteration cap for profile solves.  Damped Newton either converges
/// within a handful of steps from a reasonable guess or wanders; 50 leaves
/// room for slow basin entry without hiding divergence.
pub const PROFILE_MAX_ITER: usize = 50;

/// A localized solution of the comoving steady equation together with the
/// diagnostics the analysis layers need.
#[derive(Clone, Debug)]
pub struct PulseProfile {
    pub grid: Grid1,
    pub state: Field1,
    /// Comoving frame speed; `0` exactly for standing solves.
    pub speed: f64,
    /// Homogeneous background equilibrium the tails decay to.
    pub background: [f64; 3],
    /// Max-norm of the steady residual at the returned state.
    pub residual: f64,
    pub newton_iterations: usize,
    /// Amplitude-weighted center of the `u` excursion.
    pub center: f64,
    /// Whether the centered profile is reflection-symmetric to [`SYMMETRY_TOL`].
    pub symmetric: bool,
}

impl PulseProfile {
    /// Peak departure of the `u` component from background.
    pub fn amplitude(&self) -> f64 {
        let bg = self.background[0];
        self.state
            .comp(0)
            .iter()
            .fold(0.0f64, |m, &u| m.max((u - bg).abs()))
    }

    /// Spatial derivative of the state, natural layout; spans the kernel of
    /// the steady Jacobian (the translation mode) up to discretization error.
    pub fn derivative(&self) -> Vec<f64> {
        state_derivative(&self.grid, &self.state)
    }

    /// True when the measured speed is numerically zero.
    pub fn is_standing(&self) -> bool {
        self.speed.abs() < STANDING_SPEED_FLOOR
    }

    /// Grid node closest to the pulse center.
    pub fn center_node(&self) -> usize {
        ((self.center / self.grid.dx).round() as usize).min(self.grid.n - 1)
    }
}

/// Signed displacement from `x_pin` to `x` used by the centroid pin: the
/// plain difference on Neumann grids, the shortest periodic wrap on periodic
/// ones.  The wrapped displacement is genuinely odd about `x_pin`, which the
/// raw difference is not — its jump at the antipode would drag a symmetric
/// pulse off its node by `(L/2)·u_tail/mass` (a few `1e-6` on the analysis
/// grid, enough to wreck the parity diagnostics of the steep front).  The
/// exact antipode is its own mirror image, so it gets weight zero.
pub(crate) fn pin_displacement(grid: &Grid1, x: f64, x_pin: f64) -> f64 {
    match grid.bc {
        crate::grid::Boundary::Neumann => x - x_pin,
        crate::grid::Boundary::Periodic => {
            let l = grid.length();
            let mut d = (x - x_pin).rem_euclid(l);
            if d > 0.5 * l {
                d -= l;
            }
            // Displacements are node multiples of dx, so a quarter step
            // safely identifies the exact antipode.
            if (d.abs() - 0.5 * l).abs() < 0.25 * grid.dx {
                0.0
            } else {
                d
            }
        }
    }
}

/// Amplitude-weighted centroid of the positive `u` excursion; robust to the
/// small negative undershoot in the pulse wings.  Uses absolute coordinates,
/// so it assumes the pulse sits away from the periodic seam — every builder
/// in this module places it mid-domain.
fn centroid(grid: &Grid1, state: &Field1, bg_u: f64) -> f64 {
    let mut mass = 0.0;
    let mut moment = 0.0;
    for (i, &u) in state.comp(0).iter().enumerate() {
        let e = (u - bg_u).max(0.0);
        let w = node_weight(grid, i);
        mass += w * e;
        moment += w * e * grid.x(i);
    }
    if mass > 0.0 {
        moment / mass
    } else {
        0.5 * grid.length()
    }
}

fn field_from(n: usize, x: &[f64]) -> Field1 {
    Field1::from_fn(N_COMP, n, |c, i| x[c * n + i])
}

fn profile_from_state(
    grid: &Grid1,
    state: Field1,
    speed: f64,
    background: [f64; 3],
    residual: f64,
    newton_iterations: usize,
) -> Result<PulseProfile, PulseError> {
    let n = grid.n;
    let bg_u = background[0];
    let amplitude = state
        .comp(0)
        .iter()
        .fold(0.0f64, |m, &u| m.max((u - bg_u).abs()));
    if amplitude < UNIFORM_AMPLITUDE_FLOOR {
        return Err(PulseError::ConvergedToUniform { amplitude });
    }
    let center = centroid(grid, &state, bg_u);
    let mut excursion = vec![0.0; N_COMP * n];
    for c in 0..N_COMP {
        for i in 0..n {
            excursion[c * n + i] = state.comp(c)[i] - background[c];
        }
    }
    let (even_defect, _) = parity_defects(grid, &excursion, center);
    Ok(PulseProfile {
        grid: *grid,
        state,
        speed,
        background,
        residual,
        newton_iterations,
        center,
        symmetric: even_defect < SYMMETRY_TOL,
    })
}

fn newton_options() -> NewtonOptions {
    NewtonOptions {
        max_iter: PROFILE_MAX_ITER,
        ..NewtonOptions::default()
    }
}

fn map_newton_err(err: NumericsError, context: &str) -> PulseError {
    match err {
        NumericsError::NoConvergence {
            iterations,
            residual,
            ..
        } => PulseError::NewtonDiverged {
            iterations,
            residual,
            context: context.to_string(),
        },
        other => PulseError::Numerics(other),
    }
}

/// Solve for a standing pulse (`c = 0`) from an initial guess with a single
/// localized bump.
///
/// The translation family is pinned by fixing the first moment of
/// `u − u_bg` about the guess's centroid, so the converged pulse stays where
/// the guess put it.  Errors: [`PulseError::NewtonDiverged`] when damped
/// Newton cannot reach the `1e-10` residual within [`PROFILE_MAX_ITER`]
/// iterations, [`PulseError::ConvergedToUniform`] when it reaches it by
/// flattening the bump.
pub fn find_standing_pulse<M: ModelSpec>(
    model: &M,
    grid: &Grid1,
    guess: &Field1,
) -> Result<PulseProfile, PulseError> {
    let n = grid.n;
    assert_eq!(guess.n, n);
    assert_eq!(guess.n_comp, N_COMP);
    let background = model.background()?;
    let fold = FoldOrder::new(n);
    let x_pin = centroid(grid, guess, background[0]);

    // Pin row (fold layout): first moment of the u component about x_pin,
    // with periodic-aware displacements so the row is odd about the pin.
    let mut pin_row = vec![0.0; N_COMP * n];
    for i in 0..n {
        pin_row[fold.index(i, 0)] = node_weight(grid, i) * pin_displacement(grid, grid.x(i), x_pin);
    }

    let mut x = guess.as_slice().to_vec();
    let mut residual = |x: &[f64], out: &mut [f64]| {
        steady_residual(grid, model, &field_from(n, x), 0.0, out);
    };
    let mut solve_linear = |x: &[f64], f: &[f64]| -> Result<Vec<f64>, NumericsError> {
        let state = field_from(n, x);
        let a = steady_jacobian(grid, model, &state, 0.0);
        let af = a.factor()?;
        // Border column: the translation direction of the *current* state;
        // near the solution it spans the null direction the pin removes.
        let col = fold.interleave(&state_derivative(grid, &state));
        // Pin residual: drives the centroid back onto x_pin (linear, hence
        // exact after one accepted step).
        let mut pin = 0.0;
        for i in 0..n {
            pin += node_weight(grid, i)
                * pin_displacement(grid, grid.x(i), x_pin)
                * (state.comp(0)[i] - background[0]);
        }
        let sys = BorderedSystem {
            a: &a,
            af: &af,
            b_cols: &[col],
            c_rows: &[pin_row.clone()],
            d: &[vec![0.0]],
        };
        let (delta, _slack) = solve_bordered(&sys, &fold.interleave(f), &[pin])?;
        Ok(fold.deinterleave(&delta))
    };

    let report = newton_solve(&mut x, &mut residual, &mut solve_linear, &newton_options())
        .map_err(|e| map_newton_err(e, "standing pulse solve"))?;

    profile_from_state(
        grid,
        field_from(n, &x),
        0.0,
        background,
        report.residual,
        report.iterations,
    )
}

/// Solve for a traveling pulse, treating the speed as an unknown alongside
/// the profile.
///
/// The phase condition `⟨U − U_ref, ∂_z U_ref⟩_w = 0` (reference = the guess
/// profile) replaces the standing pin.  A solve that converges onto the
/// symmetric branch simply returns `speed ≈ 0`; use
/// [`PulseProfile::is_standing`] to detect the collapse rather than treating
/// it as an error.
pub fn find_traveling_pulse<M: ModelSpec>(
    model: &M,
    grid: &Grid1,
    guess: &PulseProfile,
    c_guess: f64,
) -> Result<PulseProfile, PulseError> {
    let n = grid.n;
    assert_eq!(guess.state.n, n);
    let background = model.background()?;
    let fold = FoldOrder::new(n);
    let tau = model.time_constants();

    let u_ref = guess.state.as_slice().to_vec();
    let du_ref = state_derivative(grid, &guess.state);
    // Phase row in fold layout: weighted reference derivative.
    let mut phase_row = vec![0.0; N_COMP * n];
    for i in 0..n {
        let w = node_weight(grid, i);
        for c in 0..N_COMP {
            phase_row[fold.index(i, c)] = w * du_ref[c * n + i];
        }
    }

    let m = N_COMP * n;
    let mut y = Vec::with_capacity(m + 1);
    y.extend_from_slice(&u_ref);
    y.push(c_guess);

    let mut residual = |y: &[f64], out: &mut [f64]| {
        let state = field_from(n, &y[..m]);
        steady_residual(grid, model, &state, y[m], &mut out[..m]);
        let mut phase = 0.0;
        for k in 0..m {
            let i = k % n;
            phase += node_weight(grid, i) * (y[k] - u_ref[k]) * du_ref[k];
        }
        out[m] = phase;
    };
    let mut solve_linear = |y: &[f64], f: &[f64]| -> Result<Vec<f64>, NumericsError> {
        let state = field_from(n, &y[..m]);
        let speed = y[m];
        let a = steady_jacobian(grid, model, &state, speed);
        let af = a.factor()?;
        // ∂R/∂c = T U_z of the current state.
        let du = state_derivative(grid, &state);
        let mut c_col = vec![0.0; m];
        for c in 0..N_COMP {
            for i in 0..n {
                c_col[c * n + i] = tau[c] * du[c * n + i];
            }
        }
        let sys = BorderedSystem {
            a: &a,
            af: &af,
            b_cols: &[fold.interleave(&c_col)],
            c_rows: &[phase_row.clone()],
            d: &[vec![0.0]],
        };
        let (delta_u, delta_c) = solve_bordered(&sys, &fold.interleave(&f[..m]), &[f[m]])?;
        let mut delta = fold.deinterleave(&delta_u);
        delta.push(delta_c[0]);
        Ok(delta)
    };

    let report = newton_solve(&mut y, &mut residual, &mut solve_linear, &newton_options())
        .map_err(|e| map_newton_err(e, "traveling pulse solve"))?;

    profile_from_state(
        grid,
        field_from(n, &y[..m]),
        y[m],
        background,
        report.residual,
        report.iterations,
    )
}

/// Wrap an already-solved state — a continuation point, a checkpoint loaded
/// from disk — in a [`PulseProfile`], recomputing the residual and the
/// diagnostics instead of trusting the caller.  The state is *not* polished;
/// `residual` reports whatever the state actually satisfies.
pub fn profile_from_solution<M: ModelSpec>(
    model: &M,
    grid: &Grid1,
    state: Field1,
    speed: f64,
) -> Result<PulseProfile, PulseError> {
    let background = model.background()?;
    let mut r = vec![0.0; N_COMP * grid.n];
    steady_residual(grid, model, &state, speed, &mut r);
    let residual = r.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    profile_from_state(grid, state, speed, background, residual, 0)
}

/// Build a standing pulse from scratch: place a Gaussian bump of the given
/// amplitude and width on the background, let the stiff components slave to
/// it with a short implicit-explicit relaxation, and polish with
/// [`find_standing_pulse`].
///
/// The relaxation rounds make the builder robust to the crude single-bump
/// guess (the fast `u` front forms within a unit of model time, far shorter
/// than the slow-field instabilities that could deform a pulse); pure Newton
/// from a bare bump works at many parameter values but not uniformly across
/// the regime of interest.
pub fn standing_pulse_from_bump<M: ModelSpec>(
    model: &M,
    grid: &Grid1,
    center: f64,
    amplitude: f64,
    width: f64,
) -> Result<PulseProfile, PulseError> {
    let background = model.background()?;
    let mut guess = Field1::from_fn(N_COMP, grid.n, |c, i| {
        let g = (-((grid.x(i) - center) / width).powi(2)).exp();
        background[c] + if c == 0 { amplitude * g } else { 0.0 }
    });

    const RELAX_ROUNDS: usize = 3;
    const RELAX_TIME: f64 = 2.0;
    const RELAX_DT: f64 = 1e-3;
    let mut last_err = None;
    for round in 0..=RELAX_ROUNDS {
        match find_standing_pulse(model, grid, &guess) {
            Ok(p) => return Ok(p),
            Err(e @ PulseError::ConvergedToUniform { .. }) => return Err(e),
            Err(e) => last_err = Some((round, e)),
        }
        let stepper = ImexStepper1::new(*grid, model, RELAX_DT);
        let steps = (RELAX_TIME / RELAX_DT).round() as usize;
        stepper.evolve(&mut guess, steps, 0, &mut |_, _| true);
    }
    let (round, err) = last_err.expect("loop ran at least once");
    Err(match err {
        PulseError::NewtonDiverged {
            iterations,
            residual,
            ..
        } => PulseError::NewtonDiverged {
            iterations,
            residual,
            context: format!("bump builder after {round} relaxation rounds"),
        },
        other => other,
    })
}

/// Weighted correlation ⟨f, g⟩ / (‖f‖ ‖g‖); used by tests and the spectrum
/// layer to identify modes against reference directions.
pub fn correlation(grid: &Grid1, f: &[f64], g: &[f64]) -> f64 {
    let ff = inner(grid, f, f);
    let gg = inner(grid, g, g);
    if ff == 0.0 || gg == 0.0 {
        return 0.0;
    }
    inner(grid, f, g) / (ff.sqrt() * gg.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Fhn3;

    /// Grid used by the fast solver tests: fine enough for the sharp `u`
    /// front (interface width ≈ √D_u ≈ 2·10⁻³) yet cheap to assemble.
    fn tail_grid() -> Grid1 {
        Grid1::neumann(1.0, 2001)
    }

    #[test]
    fn standing_pulse_converges_and_is_symmetric() {
        let model = Fhn3::baseline(3.0, 1200.0);
        let grid = tail_grid();
        let pulse = standing_pulse_from_bump(&model, &grid, 0.5, 2.0, 0.02)
            .expect("standing pulse at a point well inside the existence region");
        assert!(
            pulse.residual < 1e-10,
            "converged residual {:.3e} above solver tolerance",
            pulse.residual
        );
        assert!(
            pulse.amplitude() > 1.0,
            "pulse amplitude {:.3} suspiciously small",
            pulse.amplitude()
        );
        assert!(
            pulse.symmetric,
            "standing pulse should be reflection-symmetric about its center"
        );
        assert!(
            (pulse.center - 0.5).abs() < 0.02,
            "centroid pin let the pulse wander to x = {:.4}",
            pulse.center
        );
        // The background must be the model's own uniform state, not some
        // drifted value: check the tails sit on it.
        let wall_u = pulse.state.comp(0)[0];
        assert!(
            (wall_u - pulse.background[0]).abs() < 1e-6,
            "tail value {wall_u:.8} vs background {:.8}",
            pulse.background[0]
        );
    }

    #[test]
    fn converged_profile_reconverges_immediately() {
        let model = Fhn3::baseline(3.0, 1200.0);
        let grid = tail_grid();
        let first = standing_pulse_from_bump(&model, &grid, 0.5, 2.0, 0.02).expect("first solve");
        let again = find_standing_pulse(&model, &grid, &first.state)
            .expect("re-solve from a converged state");
        assert!(
            again.newton_iterations <= 2,
            "warm restart took {} iterations; quadratic convergence should need at most 2",
            again.newton_iterations
        );
    }

    #[test]
    fn uniform_guess_is_rejected_not_returned() {
        let model = Fhn3::baseline(3.0, 1200.0);
        let grid = Grid1::neumann(1.0, 201);
        let bg = model.background().expect("cubic background");
        let guess = Field1::constant(3, grid.n, &bg);
        match find_standing_pulse(&model, &grid, &guess) {
            Err(PulseError::ConvergedToUniform { amplitude }) => {
                assert!(
                    amplitude < 1e-8,
                    "uniform guess should stay uniform, amplitude {amplitude:.3e}"
                );
            }
            other => panic!("expected ConvergedToUniform, got {other:?}"),
        }
    }

    #[test]
    fn standing_pulse_exists_on_the_periodic_analysis_grid() {
        let model = Fhn3::baseline(3.0, 1200.0);
        let grid = Grid1::periodic(0.25, 500);
        let pulse = standing_pulse_from_bump(&model, &grid, 0.125, 2.0, 0.02)
            .expect("standing pulse on the periodic grid");
        assert!(pulse.residual < 1e-10);
        assert!(
            pulse.symmetric,
            "periodic standing pulse should be symmetric about its center"
        );
    }

    #[test]
    fn traveling_solve_collapses_to_standing_inside_the_symmetric_regime() {
        // At τ = 1200, k₄ = 3.0 the standing pulse is the only pulse
        // solution; seeding a traveling solve there must fall back onto it.
        let model = Fhn3::baseline(3.0, 1200.0);
        let grid = tail_grid();
        let standing = standing_pulse_from_bump(&model, &grid, 0.5, 2.0, 0.02).expect("standing");
        let tp = find_traveling_pulse(&model, &grid, &standing, 1e-4)
            .expect("traveling solve seeded from the standing pulse");
        assert!(
            tp.is_standing(),
            "speed {:.3e} should collapse below the standing floor {STANDING_SPEED_FLOOR:.1e}",
            tp.speed
        );
    }
}
