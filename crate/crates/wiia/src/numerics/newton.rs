//! Damped Newton driver over caller-supplied residual and linear-solve
//! callbacks. The linear solve owns Jacobian assembly, so bordered and
//! banded structure stays with the problem while the driver only sees
//! vectors; this is what the pulse profile and continuation correctors
//! share.

use super::NumericsError;

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    /// Convergence threshold on the max-norm of the residual.
    pub tol: f64,
    pub max_iter: usize,
    /// Enable backtracking (halve the step until the residual norm drops).
    pub damping: bool,
    /// Maximum number of halvings per iteration when damping.
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 25,
            damping: true,
            max_backtracks: 12,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NewtonReport {
    pub iterations: usize,
    /// Max-norm of the final residual.
    pub residual: f64,
    /// Max-norm of the last update, a cheap conditioning diagnostic.
    pub last_step: f64,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Sufficient-decrease fraction for the backtracking line search. The
/// Newton direction satisfies `grad(0.5 ||F||^2) . (-d) = -||F||^2`, so a
/// small Armijo constant always admits some step; anything aggressive can
/// reject every step near a turning point of the residual landscape.
const ARMIJO: f64 = 1e-4;

/// Solve `F(x) = 0` starting from `x` (updated in place).
///
/// `residual` writes `F(x)` into its output slice; `solve_linear` returns
/// the Newton update `d` with `J(x) d = rhs`.
pub fn newton_solve(
    x: &mut [f64],
    residual: &mut dyn FnMut(&[f64], &mut [f64]),
    solve_linear: &mut dyn FnMut(&[f64], &[f64]) -> Result<Vec<f64>, NumericsError>,
    opts: &NewtonOptions,
) -> Result<NewtonReport, NumericsError> {
    let n = x.len();
    let mut f = vec![0.0; n];
    let mut f_trial = vec![0.0; n];
    let mut x_trial = vec![0.0; n];

    residual(x, &mut f);
    let mut fnorm = max_norm(&f);
    let mut merit = two_norm(&f);
    let mut last_step = 0.0;

    for it in 0..opts.max_iter {
        if fnorm <= opts.tol {
            return Ok(NewtonReport {
                iterations: it,
                residual: fnorm,
                last_step,
            });
        }
        let delta = solve_linear(x, &f)?;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..=if opts.damping { opts.max_backtracks } else { 0 } {
            for i in 0..n {
                x_trial[i] = x[i] - lambda * delta[i];
            }
            residual(&x_trial, &mut f_trial);
            let trial_merit = two_norm(&f_trial);
            // Armijo decrease on the 2-norm merit (the Newton direction is
            // a descent direction for it even where the Jacobian is nearly
            // singular); convergence itself is judged in the max-norm.
            if trial_merit < (1.0 - ARMIJO * lambda) * merit || max_norm(&f_trial) <= opts.tol {
                x.copy_from_slice(&x_trial);
                f.copy_from_slice(&f_trial);
                fnorm = max_norm(&f);
                merit = trial_merit;
                last_step = lambda * max_norm(&delta);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(NumericsError::NoConvergence {
                what: "Newton iteration (line search stalled)",
                iterations: it + 1,
                residual: fnorm,
            });
        }
    }
    if fnorm <= opts.tol {
        Ok(NewtonReport {
            iterations: opts.max_iter,
            residual: fnorm,
            last_step,
        })
    } else {
        Err(NumericsError::NoConvergence {
            what: "Newton iteration",
            iterations: opts.max_iter,
            residual: fnorm,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Intersect the unit circle with a parabola; root at (x, y) with
    /// x^2 + y^2 = 1, y = x^2. Exact y solves y^2 + y - 1 = 0.
    fn residual(x: &[f64], out: &mut [f64]) {
        out[0] = x[0] * x[0] + x[1] * x[1] - 1.0;
        out[1] = x[1] - x[0] * x[0];
    }

    fn solve_2x2(x: &[f64], rhs: &[f64]) -> Result<Vec<f64>, NumericsError> {
        // Analytic Jacobian of the system above.
        let j = [[2.0 * x[0], 2.0 * x[1]], [-2.0 * x[0], 1.0]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return Err(NumericsError::SingularMatrix { column: 0, pivot: det.abs() });
        }
        Ok(vec![
            (rhs[0] * j[1][1] - rhs[1] * j[0][1]) / det,
            (j[0][0] * rhs[1] - j[1][0] * rhs[0]) / det,
        ])
    }

    #[test]
    fn newton_converges_quadratically_near_root() {
        let mut x = vec![0.8, 0.6];
        let report = newton_solve(
            &mut x,
            &mut residual,
            &mut solve_2x2,
            &NewtonOptions::default(),
        )
        .expect("newton");
        let y_exact = (5.0f64.sqrt() - 1.0) / 2.0;
        assert!((x[1] - y_exact).abs() < 1e-12);
        assert!((x[0] - y_exact.sqrt()).abs() < 1e-12);
        assert!(
            report.iterations <= 6,
            "expected quadratic convergence, took {} iterations",
            report.iterations
        );
    }

    #[test]
    fn damping_rescues_a_poor_initial_guess() {
        // From (0.1, 2) the full Newton step lands at (5.05, 1.0) and
        // inflates the residual sevenfold, so the undamped iteration is
        // rejected immediately; backtracking walks the same start into the
        // root. (A start on the far side of the singular line x = 0, such
        // as (3, -4), defeats any line-search Newton and is out of scope.)
        let start = vec![0.1, 2.0];
        let mut x_undamped = start.clone();
        let undamped = newton_solve(
            &mut x_undamped,
            &mut residual,
            &mut solve_2x2,
            &NewtonOptions {
                damping: false,
                ..Default::default()
            },
        );
        assert!(undamped.is_err(), "undamped step should be rejected");

        let mut x = start;
        let report = newton_solve(
            &mut x,
            &mut residual,
            &mut solve_2x2,
            &NewtonOptions {
                max_iter: 60,
                ..Default::default()
            },
        )
        .expect("newton with damping");
        assert!(report.residual < 1e-10);
        let y_exact = (5.0f64.sqrt() - 1.0) / 2.0;
        assert!((x[1] - y_exact).abs() < 1e-9);
    }

    #[test]
    fn undamped_newton_reports_failure_rather_than_looping() {
        // From this start the full step overshoots back and forth on
        // f(x) = atan-like flat landscape: x' = x - f/f' diverges for
        // |x| > ~1.39 with f = atan(x).
        let mut x = vec![2.0];
        let mut res = |x: &[f64], out: &mut [f64]| {
            out[0] = x[0].atan();
        };
        let mut solve = |x: &[f64], rhs: &[f64]| -> Result<Vec<f64>, NumericsError> {
            Ok(vec![rhs[0] * (1.0 + x[0] * x[0])])
        };
        let r = newton_solve(
            &mut x,
            &mut res,
            &mut solve,
            &NewtonOptions {
                damping: false,
                max_iter: 12,
                ..Default::default()
            },
        );
        assert!(r.is_err(), "undamped atan Newton from x=2 must diverge");
        // With damping the same start converges.
        let mut x2 = vec![2.0];
        newton_solve(&mut x2, &mut res, &mut solve, &NewtonOptions::default())
            .expect("damped converges");
        assert!(x2[0].abs() < 1e-10);
    }
}
