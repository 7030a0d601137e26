//! Pseudo-arclength continuation of pulse branches, eigenvalue-crossing
//! refinement, and the two-parameter search for the point where the drift
//! and oscillatory instabilities coincide.
//!
//! # Continuation
//!
//! A branch is traced in one model parameter `p` with the profile (and, on
//! traveling branches, the speed) as unknowns.  Each step predicts along the
//! normalized tangent and corrects with Newton on the extended system
//!
//! ```text
//! R(U, c, p)            = 0            (comoving steady residual)
//! pin(U)  or  phase(U)  = 0            (translation gauge)
//! ⟨y − y_pred, t⟩       = 0            (arclength plane)
//! ```
//!
//! solved through the same banded-plus-borders factorization as the profile
//! solvers (border columns: translation slack or `∂R/∂c`, and the
//! finite-difference `∂R/∂p`).  The step size adapts to corrector effort;
//! tangent orientation is inherited step to step, so the branch continues
//! through folds, which are detected as sign changes of the tangent's
//! parameter component and recorded with an interpolated fold location.
//!
//! Per-point stability data (translation, drift, and oscillatory
//! eigenvalues) is attached in a second pass that is data-parallel when the
//! `parallel` feature is on — the corrector itself is inherently sequential,
//! but the spectra are independent.
//!
//! # Crossing refinement and the codimension-two point
//!
//! [`detect_bifurcations`] scans a branch for sign changes of the tracked
//! real parts and sharpens each by a guarded secant iteration on the actual
//! eigenvalue (re-solving the profile at every trial parameter), down to
//! `|Re λ| < 1e-6` — far below the eigenvalue resolution that matters for
//! any consumer.  [`locate_dh_point`] runs a Broyden iteration on the
//! two-vector `(Re λ_drift, Re λ_osc)(p_a, p_b)` of the *standing* pulse,
//! with finite-difference Jacobian restarts, to land on the organizing
//! center where both instabilities set in together.

use super::operator::{
    inner, node_weight, state_derivative, steady_jacobian, steady_residual, FoldOrder, N_COMP,
};
use super::profile::{
    find_standing_pulse, find_traveling_pulse, pin_displacement, profile_from_solution,
    PulseProfile, UNIFORM_AMPLITUDE_FLOOR,
};
use super::spectrum::{leading_eigenvalues, EigenSummary, DEFAULT_OMEGA_GUESS};
use super::{PulseError, SpectralData};
use crate::grid::{Field1, Grid1};
use crate::models::ModelSpec;
use crate::numerics::{solve_bordered, BorderedSystem};
use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Tuning of the pseudo-arclength driver.
#[derive(Clone, Debug)]
pub struct ContinuationOptions {
    /// Initial arclength step (profile-norm units plus parameter units).
    pub ds0: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_steps: usize,
    /// Corrector convergence threshold on the max-norm of the extended
    /// residual (same scale as the profile solvers).
    pub corrector_tol: f64,
    /// Corrector iteration cap; predicted points converge in 2–4
    /// iterations, so needing more means the step was too greedy.
    pub corrector_max_iter: usize,
    /// Attach per-point eigenvalues after tracing.
    pub compute_spectra: bool,
    /// Shift for the oscillatory eigenvalue search.
    pub omega_guess: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            ds0: 2e-3,
            ds_min: 1e-7,
            ds_max: 2e-2,
            max_steps: 400,
            corrector_tol: 1e-10,
            corrector_max_iter: 8,
            compute_spectra: true,
            omega_guess: DEFAULT_OMEGA_GUESS,
        }
    }
}

/// One accepted continuation point.
#[derive(Clone, Debug)]
pub struct BranchPoint {
    pub param: f64,
    pub speed: f64,
    pub state: Field1,
    /// Peak `u` value (plotting coordinate).
    pub max_u: f64,
    /// Peak `u` excursion above background.
    pub amplitude: f64,
    /// Parameter component of the accepted unit tangent; its sign flips at
    /// folds.
    pub tangent_param: f64,
    pub lambda_translation: Option<Complex64>,
    pub lambda_drift: Option<Complex64>,
    pub drift_odd: Option<bool>,
    pub lambda_hopf: Option<Complex64>,
}

/// A traced branch with its fold locations.
#[derive(Clone, Debug)]
pub struct Branch {
    pub grid: Grid1,
    pub traveling: bool,
    pub points: Vec<BranchPoint>,
    /// Interpolated parameter values where the tangent's parameter
    /// component changed sign.
    pub folds: Vec<f64>,
}

/// What kind of instability threshold a refined crossing is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BifurcationKind {
    /// A real, translation-breaking eigenvalue crosses zero (standing
    /// pulses start to drift).
    Drift,
    /// A complex pair crosses the axis (the pulse starts to breathe).
    Hopf,
    /// A fold of the branch itself (tangent reversal).
    Fold,
}

/// A refined eigenvalue crossing on a branch.
#[derive(Clone, Debug)]
pub struct Bifurcation {
    pub kind: BifurcationKind,
    pub param: f64,
    /// Crossing eigenvalue at the refined parameter (zero for folds).
    pub lambda: Complex64,
    /// Parity of the crossing mode about the pulse center, when available.
    pub mode_odd: Option<bool>,
    /// Profile speed at the refined point.
    pub speed: f64,
    /// |Re λ| actually achieved by the refinement.
    pub achieved: f64,
}

/// Result of the two-parameter organizing-center search.
#[derive(Clone, Debug)]
pub struct CodimTwoPoint {
    /// `(p_a, p_b)` at the returned point.
    pub params: (f64, f64),
    /// Residual Re λ of the drift mode there.
    pub drift_rate: f64,
    /// Residual Re λ of the oscillatory pair there.
    pub oscillatory_rate: f64,
    /// Oscillation frequency at the point.
    pub omega: f64,
    pub profile: PulseProfile,
    /// Number of profile-plus-spectrum evaluations spent.
    pub evaluations: usize,
}

/// Shared state of the extended corrector at one parameter point.
struct Corrector<'a, M: ModelSpec, F: Fn(f64) -> M> {
    family: &'a F,
    grid: Grid1,
    fold: FoldOrder,
    traveling: bool,
    /// Gauge row (natural layout, weights included) and its target value.
    gauge_row: Vec<f64>,
    gauge_rhs: f64,
}

impl<'a, M: ModelSpec, F: Fn(f64) -> M> Corrector<'a, M, F> {
    fn gauge_value(&self, u: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, &r) in self.gauge_row.iter().enumerate() {
            acc += r * u[k];
        }
        acc - self.gauge_rhs
    }

    /// Finite-difference parameter column ∂R/∂p at the current unknowns.
    fn param_column(&self, u: &Field1, c: f64, p: f64) -> Vec<f64> {
        let h = 1e-6 * p.abs().max(1.0);
        let m_plus = (self.family)(p + h);
        let m_minus = (self.family)(p - h);
        let n3 = N_COMP * self.grid.n;
        let mut r_plus = vec![0.0; n3];
        let mut r_minus = vec![0.0; n3];
        steady_residual(&self.grid, &m_plus, u, c, &mut r_plus);
        steady_residual(&self.grid, &m_minus, u, c, &mut r_minus);
        (0..n3).map(|k| (r_plus[k] - r_minus[k]) / (2.0 * h)).collect()
    }

    /// One bordered solve of the extended Jacobian at `(u, c, p)` against
    /// `(rhs_field, rhs_gauge, rhs_arc)`; `tangent` supplies the arclength
    /// row.  Returns natural-layout `(δU, δc, δp)`.
    fn solve(
        &self,
        u: &Field1,
        c: f64,
        p: f64,
        rhs_field: &[f64],
        rhs_gauge: f64,
        rhs_arc: f64,
        tangent: (&[f64], f64, f64),
    ) -> Result<(Vec<f64>, f64, f64), PulseError> {
        let n = self.grid.n;
        let model = (self.family)(p);
        let a = steady_jacobian(&self.grid, &model, u, c);
        let af = a.factor()?;

        // Border column 0: translation slack (standing) or ∂R/∂c (traveling).
        let du = state_derivative(&self.grid, u);
        let col0_nat: Vec<f64> = if self.traveling {
            let tau = model.time_constants();
            let mut v = vec![0.0; N_COMP * n];
            for comp in 0..N_COMP {
                for i in 0..n {
                    v[comp * n + i] = tau[comp] * du[comp * n + i];
                }
            }
            v
        } else {
            du
        };
        let col1_nat = self.param_column(u, c, p);

        let (t_u, t_c, t_p) = tangent;
        let mut arc_row = vec![0.0; N_COMP * n];
        for i in 0..n {
            let w = node_weight(&self.grid, i);
            for comp in 0..N_COMP {
                arc_row[self.fold.index(i, comp)] = w * t_u[comp * n + i];
            }
        }
        let mut gauge_row_fold = vec![0.0; N_COMP * n];
        for i in 0..n {
            for comp in 0..N_COMP {
                gauge_row_fold[self.fold.index(i, comp)] = self.gauge_row[comp * n + i];
            }
        }

        let b_cols = [self.fold.interleave(&col0_nat), self.fold.interleave(&col1_nat)];
        let c_rows = [gauge_row_fold, arc_row];
        let d = [
            vec![0.0, 0.0],
            vec![if self.traveling { t_c } else { 0.0 }, t_p],
        ];
        let sys = BorderedSystem {
            a: &a,
            af: &af,
            b_cols: &b_cols,
            c_rows: &c_rows,
            d: &d,
        };
        let (delta_fold, y) = solve_bordered(
            &sys,
            &self.fold.interleave(rhs_field),
            &[rhs_gauge, rhs_arc],
        )?;
        let delta_u = self.fold.deinterleave(&delta_fold);
        // y[0] is the slack (standing; discarded) or δc (traveling).
        let dc = if self.traveling { y[0] } else { 0.0 };
        Ok((delta_u, dc, y[1]))
    }

    /// Newton-correct `(u, c, p)` onto the branch through the arclength
    /// plane anchored at `pred` with normal `tangent`.  Returns iterations.
    #[allow(clippy::too_many_arguments)]
    fn correct(
        &self,
        u: &mut Field1,
        c: &mut f64,
        p: &mut f64,
        pred: (&[f64], f64, f64),
        tangent: (&[f64], f64, f64),
        tol: f64,
        max_iter: usize,
    ) -> Result<usize, PulseError> {
        let n3 = N_COMP * self.grid.n;
        let mut r = vec![0.0; n3];
        for it in 0..max_iter {
            let model = (self.family)(*p);
            steady_residual(&self.grid, &model, u, *c, &mut r);
            let r_gauge = self.gauge_value(u.as_slice());
            let (pred_u, pred_c, pred_p) = pred;
            let (t_u, t_c, t_p) = tangent;
            let mut r_arc = t_c * (*c - pred_c) + t_p * (*p - pred_p);
            for i in 0..self.grid.n {
                let w = node_weight(&self.grid, i);
                for comp in 0..N_COMP {
                    let k = comp * self.grid.n + i;
                    r_arc += w * t_u[k] * (u.as_slice()[k] - pred_u[k]);
                }
            }
            let r_inf = r
                .iter()
                .fold(0.0f64, |m, &x| m.max(x.abs()))
                .max(r_gauge.abs())
                .max(r_arc.abs());
            if r_inf < tol {
                return Ok(it);
            }
            let (du, dc, dp) = self.solve(u, *c, *p, &r, r_gauge, r_arc, tangent)?;
            for (slot, d) in u.as_mut_slice().iter_mut().zip(&du) {
                *slot -= d;
            }
            *c -= dc;
            *p -= dp;
        }
        // Final residual check after the last update.
        let model = (self.family)(*p);
        steady_residual(&self.grid, &model, u, *c, &mut r);
        let r_inf = r.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        if r_inf < tol {
            Ok(max_iter)
        } else {
            Err(PulseError::NewtonDiverged {
                iterations: max_iter,
                residual: r_inf,
                context: format!("continuation corrector at parameter {p:.6}"),
            })
        }
    }

    /// Unit tangent of the extended system at `(u, c, p)`: solve the
    /// extended Jacobian against the arclength unit vector, then normalize
    /// and orient along `orient` (previous tangent, or a parameter
    /// direction for the first step).
    fn tangent_at(
        &self,
        u: &Field1,
        c: f64,
        p: f64,
        prev: (&[f64], f64, f64),
        orient: (&[f64], f64, f64),
    ) -> Result<(Vec<f64>, f64, f64), PulseError> {
        let n3 = N_COMP * self.grid.n;
        let zeros = vec![0.0; n3];
        let (du, dc, dp) = self.solve(u, c, p, &zeros, 0.0, -1.0, prev)?;
        // solve() returns the Newton decrement for rhs; the tangent is the
        // solution of J t = e_arc, i.e. the negated decrement of rhs −e_arc.
        let mut t_u: Vec<f64> = du.iter().map(|x| -x).collect();
        let mut t_c = -dc;
        let mut t_p = -dp;
        let mut norm2 = t_c * t_c + t_p * t_p;
        for i in 0..self.grid.n {
            let w = node_weight(&self.grid, i);
            for comp in 0..N_COMP {
                let k = comp * self.grid.n + i;
                norm2 += w * t_u[k] * t_u[k];
            }
        }
        let s = norm2.sqrt();
        if s == 0.0 {
            return Err(PulseError::ContinuationStalled {
                param: p,
                context: "degenerate (zero) branch tangent".into(),
            });
        }
        let (o_u, o_c, o_p) = orient;
        let mut dot = t_c * o_c + t_p * o_p;
        for i in 0..self.grid.n {
            let w = node_weight(&self.grid, i);
            for comp in 0..N_COMP {
                let k = comp * self.grid.n + i;
                dot += w * t_u[k] * o_u[k];
            }
        }
        let sign = if dot >= 0.0 { 1.0 } else { -1.0 };
        for x in &mut t_u {
            *x *= sign / s;
        }
        t_c *= sign / s;
        t_p *= sign / s;
        Ok((t_u, t_c, t_p))
    }
}

fn point_from(
    state: &Field1,
    background: [f64; 3],
    speed: f64,
    param: f64,
    tangent_param: f64,
) -> BranchPoint {
    let bg = background[0];
    let max_u = state.comp(0).iter().fold(f64::NEG_INFINITY, |m, &u| m.max(u));
    let amplitude = state.comp(0).iter().fold(0.0f64, |m, &u| m.max((u - bg).abs()));
    BranchPoint {
        param,
        speed,
        state: state.clone(),
        max_u,
        amplitude,
        tangent_param,
        lambda_translation: None,
        lambda_drift: None,
        drift_odd: None,
        lambda_hopf: None,
    }
}

/// Trace the branch through `start` from `start_param` toward
/// `range.1` (the direction is inferred from the range endpoints), stopping
/// at the range boundary, after `max_steps` points, or when the step
/// controller bottoms out (the traced prefix is returned in that case — a
/// branch ending early is data, not an error, as long as at least one
/// continuation step succeeded).
pub fn continue_branch<M, F>(
    family: &F,
    start: &PulseProfile,
    start_param: f64,
    range: (f64, f64),
    opts: &ContinuationOptions,
) -> Result<Branch, PulseError>
where
    M: ModelSpec,
    F: Fn(f64) -> M + Sync,
{
    let grid = start.grid;
    let n = grid.n;
    let n3 = N_COMP * n;
    let fold = FoldOrder::new(n);
    let traveling = !start.is_standing();
    let background = start.background;

    // Gauge: centroid pin about the start profile's center (standing) or
    // phase against the start profile (traveling).
    let mut gauge_row = vec![0.0; n3];
    let gauge_rhs;
    if traveling {
        let du_ref = state_derivative(&grid, &start.state);
        for i in 0..n {
            let w = node_weight(&grid, i);
            for comp in 0..N_COMP {
                let k = comp * n + i;
                gauge_row[k] = w * du_ref[k];
            }
        }
        gauge_rhs = gauge_row
            .iter()
            .zip(start.state.as_slice())
            .map(|(r, u)| r * u)
            .sum();
    } else {
        for i in 0..n {
            gauge_row[i] =
                node_weight(&grid, i) * pin_displacement(&grid, grid.x(i), start.center);
        }
        // The profile solver's pin drives ⟨u − u_bg, w d(x)⟩ to zero;
        // written as ⟨row, u⟩ = rhs that makes the target bg_u · Σ row.
        gauge_rhs = background[0] * gauge_row.iter().take(n).sum::<f64>();
    }

    let corr = Corrector {
        family,
        grid,
        fold,
        traveling,
        gauge_row,
        gauge_rhs,
    };

    // Re-polish the start point under this gauge.
    let mut u = start.state.clone();
    let mut c = start.speed;
    let mut p = start_param;
    {
        let zero_t = vec![0.0; n3];
        let p0 = p;
        // With t = (0, 0, 1) the arclength row reduces to δp = 0: a plain
        // profile correction at fixed parameter.
        corr.correct(
            &mut u,
            &mut c,
            &mut p,
            (&zero_t, 0.0, p0),
            (&zero_t, 0.0, 1.0),
            opts.corrector_tol,
            opts.corrector_max_iter,
        )
        .map_err(|e| match e {
            PulseError::NewtonDiverged { iterations, residual, .. } => {
                PulseError::NewtonDiverged {
                    iterations,
                    residual,
                    context: "re-converging the branch start point".into(),
                }
            }
            other => other,
        })?;
    }

    // First tangent, oriented toward the far end of the range.
    let dir = if range.1 >= range.0 { 1.0 } else { -1.0 };
    let zero_t = vec![0.0; n3];
    let fixed_p = (zero_t.as_slice(), 0.0, 1.0);
    let orient0 = (zero_t.as_slice(), 0.0, dir);
    let (mut t_u, mut t_c, mut t_p) = corr.tangent_at(&u, c, p, fixed_p, orient0)?;

    let lo = range.0.min(range.1);
    let hi = range.0.max(range.1);
    let mut branch = Branch {
        grid,
        traveling,
        points: vec![point_from(&u, background, c, p, t_p)],
        folds: Vec::new(),
    };

    let mut ds = opts.ds0;
    while branch.points.len() < opts.max_steps {
        // Predict.
        let mut u_try = u.clone();
        let mut c_try = c;
        let mut p_try = p;
        for (slot, t) in u_try.as_mut_slice().iter_mut().zip(&t_u) {
            *slot += ds * t;
        }
        c_try += ds * t_c;
        p_try += ds * t_p;
        let pred_u: Vec<f64> = u_try.as_slice().to_vec();
        let pred = (pred_u.as_slice(), c_try, p_try);

        match corr.correct(
            &mut u_try,
            &mut c_try,
            &mut p_try,
            pred,
            (&t_u, t_c, t_p),
            opts.corrector_tol,
            opts.corrector_max_iter,
        ) {
            Ok(iters) => {
                // A corrector that flattened the pulse means the branch left
                // the localized regime: stop before recording the corpse.
                let amp = u_try
                    .comp(0)
                    .iter()
                    .fold(0.0f64, |m, &v| m.max((v - background[0]).abs()));
                if amp < UNIFORM_AMPLITUDE_FLOOR {
                    break;
                }
                u = u_try;
                c = c_try;
                p = p_try;
                let (nt_u, nt_c, nt_p) =
                    corr.tangent_at(&u, c, p, (&t_u, t_c, t_p), (&t_u, t_c, t_p))?;
                if nt_p * t_p < 0.0 {
                    // Tangent reversal: interpolate the fold parameter from
                    // the sign change.
                    let prev = branch.points.last().expect("nonempty");
                    let f = t_p / (t_p - nt_p);
                    branch.folds.push(prev.param + f * (p - prev.param));
                }
                t_u = nt_u;
                t_c = nt_c;
                t_p = nt_p;
                branch.points.push(point_from(&u, background, c, p, t_p));
                if p <= lo || p >= hi {
                    break;
                }
                ds = if iters <= 3 {
                    (ds * 1.4).min(opts.ds_max)
                } else if iters >= 6 {
                    (ds * 0.6).max(opts.ds_min)
                } else {
                    ds
                };
            }
            Err(_) if ds > opts.ds_min => {
                ds = (0.5 * ds).max(opts.ds_min);
            }
            Err(e) => {
                if branch.points.len() > 1 {
                    break;
                }
                return Err(match e {
                    PulseError::NewtonDiverged { iterations, residual, .. } => {
                        PulseError::ContinuationStalled {
                            param: p,
                            context: format!(
                                "first step failed at minimum step size \
                                 (Newton: {iterations} iterations, residual {residual:.3e})"
                            ),
                        }
                    }
                    other => other,
                });
            }
        }
    }

    // Land the final point exactly on the crossed range end, so branches are
    // comparable and composable at their endpoints.  The step that crossed
    // is close, so a plain fixed-parameter correction converges in a couple
    // of iterations; if it somehow fails, the crossed point stays — a valid
    // branch point slightly past the end beats a missing one.
    let target = {
        let last = branch.points.last().expect("the start point is always present");
        if last.param < lo - 1e-14 {
            Some(lo)
        } else if last.param > hi + 1e-14 {
            Some(hi)
        } else {
            None
        }
    };
    if let Some(p_end) = target {
        let zero_t = vec![0.0; n3];
        let mut u_end = u.clone();
        let mut c_end = c;
        let mut p_clamped = p_end;
        let clamped = corr.correct(
            &mut u_end,
            &mut c_end,
            &mut p_clamped,
            (&zero_t, 0.0, p_end),
            (&zero_t, 0.0, 1.0),
            opts.corrector_tol,
            opts.corrector_max_iter,
        );
        if clamped.is_ok() {
            let amp = u_end
                .comp(0)
                .iter()
                .fold(0.0f64, |m, &v| m.max((v - background[0]).abs()));
            if amp >= UNIFORM_AMPLITUDE_FLOOR {
                let t_last = branch.points.last().expect("nonempty").tangent_param;
                *branch.points.last_mut().expect("nonempty") =
                    point_from(&u_end, background, c_end, p_clamped, t_last);
            }
        }
    }

    if opts.compute_spectra {
        attach_spectra(family, &mut branch, opts.omega_guess);
    }
    Ok(branch)
}

fn attach_one<M: ModelSpec, F: Fn(f64) -> M>(
    family: &F,
    grid: &Grid1,
    point: &mut BranchPoint,
    omega: f64,
) {
    let model = (family)(point.param);
    let profile = match profile_from_solution(&model, grid, point.state.clone(), point.speed) {
        Ok(p) => p,
        Err(_) => return,
    };
    if let Ok(s) = leading_eigenvalues(&model, &profile, Some(omega)) {
        point.lambda_translation = Some(s.lambda_translation);
        point.lambda_drift = s.lambda_drift;
        point.drift_odd = s.drift_odd;
        point.lambda_hopf = s.lambda_hopf;
    }
}

/// Attach per-point eigenvalues; parallel across points when built with the
/// `parallel` feature.
pub fn attach_spectra<M, F>(family: &F, branch: &mut Branch, omega: f64)
where
    M: ModelSpec,
    F: Fn(f64) -> M + Sync,
{
    let grid = branch.grid;
    #[cfg(feature = "parallel")]
    {
        branch
            .points
            .par_iter_mut()
            .for_each(|pt| attach_one(family, &grid, pt, omega));
    }
    #[cfg(not(feature = "parallel"))]
    {
        branch
            .points
            .iter_mut()
            .for_each(|pt| attach_one(family, &grid, pt, omega));
    }
}

/// Eigenvalue target refined by [`detect_bifurcations`].
#[derive(Clone, Copy)]
enum Tracked {
    Drift,
    Hopf,
}

/// |Re λ| at which a refined crossing is accepted.
const CROSSING_TOL: f64 = 1e-6;

fn eigen_at<M: ModelSpec, F: Fn(f64) -> M>(
    family: &F,
    grid: &Grid1,
    guess: &Field1,
    guess_speed: f64,
    traveling: bool,
    param: f64,
    omega: f64,
) -> Result<(PulseProfile, EigenSummary), PulseError> {
    let model = family(param);
    let profile = if traveling {
        let seed = profile_from_solution(&model, grid, guess.clone(), guess_speed)?;
        find_traveling_pulse(&model, grid, &seed, guess_speed)?
    } else {
        find_standing_pulse(&model, grid, guess)?
    };
    let summary = leading_eigenvalues(&model, &profile, Some(omega))?;
    Ok((profile, summary))
}

fn tracked_value(summary: &EigenSummary, what: Tracked) -> Option<f64> {
    match what {
        Tracked::Drift => summary.lambda_drift.map(|l| l.re),
        Tracked::Hopf => summary.lambda_hopf.map(|l| l.re),
    }
}

/// Refine one bracketed crossing by secant iteration with bisection guard.
#[allow(clippy::too_many_arguments)]
fn refine_crossing<M: ModelSpec, F: Fn(f64) -> M>(
    family: &F,
    grid: &Grid1,
    traveling: bool,
    what: Tracked,
    a: &BranchPoint,
    b: &BranchPoint,
    fa: f64,
    fb: f64,
    omega: f64,
) -> Result<Bifurcation, PulseError> {
    let (mut p0, mut f0) = (a.param, fa);
    let (mut p1, mut f1) = (b.param, fb);
    let mut guess = if fa.abs() < fb.abs() {
        (a.state.clone(), a.speed)
    } else {
        (b.state.clone(), b.speed)
    };
    let lo = p0.min(p1);
    let hi = p0.max(p1);
    let span = (hi - lo).max(f64::EPSILON);
    let mut last: Option<(PulseProfile, EigenSummary)> = None;

    for _ in 0..16 {
        if f1.abs() < CROSSING_TOL {
            break;
        }
        let denom = f1 - f0;
        let mut p2 = if denom.abs() > 0.0 {
            p1 - f1 * (p1 - p0) / denom
        } else {
            0.5 * (p0 + p1)
        };
        if !(lo - 0.5 * span..=hi + 0.5 * span).contains(&p2) {
            p2 = 0.5 * (p0 + p1);
        }
        let omega_here = last
            .as_ref()
            .and_then(|(_, s)| s.lambda_hopf.map(|l| l.im))
            .unwrap_or(omega);
        let (profile, summary) =
            eigen_at(family, grid, &guess.0, guess.1, traveling, p2, omega_here)?;
        let f2 = tracked_value(&summary, what).ok_or_else(|| {
            PulseError::ModeNotFound(format!(
                "tracked eigenvalue disappeared while refining near parameter {p2:.6}"
            ))
        })?;
        guess = (profile.state.clone(), profile.speed);
        last = Some((profile, summary));
        p0 = p1;
        f0 = f1;
        p1 = p2;
        f1 = f2;
    }

    let (profile, summary) = match last {
        Some(x) => x,
        None => {
            // The bracket endpoint already satisfies the tolerance.
            eigen_at(family, grid, &guess.0, guess.1, traveling, p1, omega)?
        }
    };
    let (kind, lambda) = match what {
        Tracked::Drift => (
            BifurcationKind::Drift,
            summary.lambda_drift.unwrap_or_default(),
        ),
        Tracked::Hopf => (
            BifurcationKind::Hopf,
            summary.lambda_hopf.unwrap_or_default(),
        ),
    };
    Ok(Bifurcation {
        kind,
        param: p1,
        lambda,
        mode_odd: summary.drift_odd,
        speed: profile.speed,
        achieved: f1.abs(),
    })
}

/// Scan a branch (with spectra attached) for eigenvalue crossings and
/// refine each to `|Re λ| < 1e-6`; folds recorded during tracing are
/// included as-is.  Crossings whose refinement fails are skipped rather
/// than aborting the scan — a missing point is visible in the output, a
/// fabricated one is not.
pub fn detect_bifurcations<M, F>(
    family: &F,
    branch: &Branch,
    omega_guess: f64,
) -> Vec<Bifurcation>
where
    M: ModelSpec,
    F: Fn(f64) -> M + Sync,
{
    let mut out = Vec::new();
    for pair in branch.points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if (a.param - b.param).abs() < 1e-12 {
            continue;
        }
        for what in [Tracked::Drift, Tracked::Hopf] {
            let (fa, fb) = match (
                a_value(a, what),
                a_value(b, what),
            ) {
                (Some(x), Some(y)) => (x, y),
                _ => continue,
            };
            if fa == 0.0 || fa * fb >= 0.0 {
                continue;
            }
            if let Ok(bif) = refine_crossing(
                family,
                &branch.grid,
                branch.traveling,
                what,
                a,
                b,
                fa,
                fb,
                omega_guess,
            ) {
                out.push(bif);
            }
        }
    }
    for &p in &branch.folds {
        out.push(Bifurcation {
            kind: BifurcationKind::Fold,
            param: p,
            lambda: Complex64::default(),
            mode_odd: None,
            speed: 0.0,
            achieved: 0.0,
        });
    }
    out.sort_by(|x, y| x.param.total_cmp(&y.param));
    out
}

fn a_value(p: &BranchPoint, what: Tracked) -> Option<f64> {
    match what {
        Tracked::Drift => p.lambda_drift.map(|l| l.re),
        Tracked::Hopf => p.lambda_hopf.map(|l| l.re),
    }
}

/// Evaluation cap for the two-parameter search.
const CODIM2_MAX_EVALS: usize = 60;

/// Convergence threshold on both tracked real parts.
const CODIM2_TOL: f64 = 1e-6;

/// Find the organizing center where the standing pulse's drift eigenvalue
/// and oscillatory real part vanish together, by Broyden iteration with
/// finite-difference Jacobian (re)starts.
///
/// `seed` must be a standing pulse near `start`; every evaluation warm-starts
/// from the previous profile, so the search stays on the standing branch.
/// The iteration is confined to `window = ((a_min, a_max), (b_min, b_max))`;
/// leaving it is reported as [`PulseError::SearchFailed`].
pub fn locate_dh_point<M, F>(
    family2: &F,
    seed: &PulseProfile,
    start: (f64, f64),
    window: ((f64, f64), (f64, f64)),
    omega_guess: f64,
) -> Result<CodimTwoPoint, PulseError>
where
    M: ModelSpec,
    F: Fn(f64, f64) -> M + Sync,
{
    let grid = seed.grid;
    let mut search = Codim2Search {
        family2,
        grid,
        warm: seed.state.clone(),
        omega: omega_guess,
        evals: 0,
    };

    let ((a_lo, a_hi), (b_lo, b_hi)) = window;
    let inside = |a: f64, b: f64| a >= a_lo && a <= a_hi && b >= b_lo && b <= b_hi;
    let cap_a = 0.25 * (a_hi - a_lo);
    let cap_b = 0.25 * (b_hi - b_lo);

    let (mut a, mut b) = start;
    if !inside(a, b) {
        return Err(PulseError::SearchFailed(format!(
            "start ({a:.5}, {b:.1}) outside the trust window"
        )));
    }
    let (mut g0, mut g1, mut profile) = search.eval(a, b)?;
    let mut jac = search.fd_jacobian(a, b, (g0, g1))?;

    let mut since_refresh = 0usize;
    loop {
        if g0.abs() < CODIM2_TOL && g1.abs() < CODIM2_TOL {
            return Ok(CodimTwoPoint {
                params: (a, b),
                drift_rate: g0,
                oscillatory_rate: g1,
                omega: search.omega,
                profile,
                evaluations: search.evals,
            });
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-14 {
            jac = search.fd_jacobian(a, b, (g0, g1))?;
            since_refresh = 0;
            continue;
        }
        let mut da = -(jac[1][1] * g0 - jac[0][1] * g1) / det;
        let mut db = -(-jac[1][0] * g0 + jac[0][0] * g1) / det;
        da = da.clamp(-cap_a, cap_a);
        db = db.clamp(-cap_b, cap_b);
        let (na, nb) = (a + da, b + db);
        if !inside(na, nb) {
            return Err(PulseError::SearchFailed(format!(
                "iterate ({na:.5}, {nb:.1}) left the trust window after {} evaluations",
                search.evals
            )));
        }
        let (n0, n1, np) = search.eval(na, nb)?;
        // Good Broyden update of the 2×2 Jacobian.
        let s = [na - a, nb - b];
        let y = [n0 - g0, n1 - g1];
        let ss = s[0] * s[0] + s[1] * s[1];
        if ss > 0.0 {
            let js = [
                jac[0][0] * s[0] + jac[0][1] * s[1],
                jac[1][0] * s[0] + jac[1][1] * s[1],
            ];
            for r in 0..2 {
                let coef = (y[r] - js[r]) / ss;
                jac[r][0] += coef * s[0];
                jac[r][1] += coef * s[1];
            }
        }
        let improved = n0.abs().max(n1.abs()) < g0.abs().max(g1.abs());
        a = na;
        b = nb;
        g0 = n0;
        g1 = n1;
        profile = np;
        since_refresh += 1;
        if since_refresh >= 8 || (!improved && since_refresh >= 3) {
            jac = search.fd_jacobian(a, b, (g0, g1))?;
            since_refresh = 0;
        }
    }
}

/// Warm-started evaluator for the two-parameter search: each call re-solves
/// the standing pulse from the previous state and reads off the two tracked
/// real parts, chaining the oscillatory frequency between calls.
struct Codim2Search<'a, M: ModelSpec, F: Fn(f64, f64) -> M> {
    family2: &'a F,
    grid: Grid1,
    warm: Field1,
    omega: f64,
    evals: usize,
}

impl<'a, M: ModelSpec, F: Fn(f64, f64) -> M> Codim2Search<'a, M, F> {
    fn eval(&mut self, a: f64, b: f64) -> Result<(f64, f64, PulseProfile), PulseError> {
        self.evals += 1;
        if self.evals > CODIM2_MAX_EVALS {
            return Err(PulseError::SearchFailed(format!(
                "evaluation budget ({CODIM2_MAX_EVALS}) exhausted near ({a:.5}, {b:.1})"
            )));
        }
        let model = (self.family2)(a, b);
        let profile = find_standing_pulse(&model, &self.grid, &self.warm)?;
        let summary = leading_eigenvalues(&model, &profile, Some(self.omega))?;
        let ld = summary
            .lambda_drift
            .ok_or_else(|| PulseError::ModeNotFound("drift eigenvalue not resolved".into()))?;
        let lh = summary
            .lambda_hopf
            .ok_or_else(|| PulseError::ModeNotFound("oscillatory pair not resolved".into()))?;
        self.warm = profile.state.clone();
        self.omega = lh.im;
        Ok((ld.re, lh.re, profile))
    }

    /// Forward-difference Jacobian of the tracked pair at `(a, b)` given the
    /// already-evaluated values there.
    fn fd_jacobian(&mut self, a: f64, b: f64, g: (f64, f64)) -> Result<[[f64; 2]; 2], PulseError> {
        let ha = 1e-3 * a.abs().max(1.0);
        let hb = 1e-3 * b.abs().max(1.0);
        let (ga0, ga1, _) = self.eval(a + ha, b)?;
        let (gb0, gb1, _) = self.eval(a, b + hb)?;
        Ok([
            [(ga0 - g.0) / ha, (gb0 - g.0) / hb],
            [(ga1 - g.1) / ha, (gb1 - g.1) / hb],
        ])
    }
}

/// Seed a traveling pulse just past the parity-breaking transition: the
/// leading-order traveling correction to a standing pulse is proportional to
/// the generalized translation vector, `U ≈ S + c ‖S_z‖ ψ`, so candidate
/// speeds are climbed until the traveling solve stops collapsing back onto
/// the standing branch.  Returns the collapsed (standing) solution if every
/// rung collapses — at parameters where no traveling pulse exists, that *is*
/// the answer.
pub fn seed_traveling_from_standing<M: ModelSpec>(
    model: &M,
    standing: &PulseProfile,
    spectral: &SpectralData,
) -> Result<PulseProfile, PulseError> {
    let grid = standing.grid;
    let sz = state_derivative(&grid, &standing.state);
    let sz_norm = inner(&grid, &sz, &sz).sqrt();
    let mut last = None;
    for &c0 in &[1e-3, 3e-3, 1e-2, 3e-2, 0.1] {
        let mut guess = standing.clone();
        for (slot, psi) in guess
            .state
            .as_mut_slice()
            .iter_mut()
            .zip(&spectral.generalized)
        {
            *slot += c0 * sz_norm * psi;
        }
        guess.speed = c0;
        let solved = find_traveling_pulse(model, &grid, &guess, c0)?;
        if !solved.is_standing() {
            return Ok(solved);
        }
        last = Some(solved);
    }
    Ok(last.expect("ladder is nonempty"))
}
