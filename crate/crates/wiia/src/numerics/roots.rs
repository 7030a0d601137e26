//! Bracketed scalar root finding: plain bisection (for discontinuous or
//! expensive classifier-style functions where only the sign is reliable)
//! and a guarded secant iteration (for smooth indicator functions such as
//! eigenvalue real parts along a branch).

use super::NumericsError;

/// A sign-change bracket `[a, b]` with `f(a) * f(b) < 0`.
#[derive(Clone, Copy, Debug)]
pub struct Bracket {
    pub a: f64,
    pub b: f64,
}

/// Bisect `f` on `bracket` until the interval is below `xtol` (absolute).
/// Returns the midpoint of the final interval.
///
/// The function values at the endpoints are evaluated once up front; a
/// missing sign change is an error rather than a silent wrong answer.
pub fn bisect(
    f: &mut dyn FnMut(f64) -> f64,
    bracket: Bracket,
    xtol: f64,
    max_iter: usize,
) -> Result<f64, NumericsError> {
    let (mut a, mut b) = (bracket.a, bracket.b);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa > 0.0) == (fb > 0.0) {
        return Err(NumericsError::NoBracket { a, fa, b, fb });
    }
    let sign_a = fa > 0.0;
    for _ in 0..max_iter {
        let mid = 0.5 * (a + b);
        if (b - a).abs() <= xtol || mid == a || mid == b {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Secant iteration from `x0`, `x1`, falling back to bisection-style damping
/// when an iterate leaves `[lo, hi]`. Converges when `|f| < ftol` or the
/// update is below `xtol`.
pub fn secant(
    f: &mut dyn FnMut(f64) -> f64,
    x0: f64,
    x1: f64,
    lo: f64,
    hi: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<f64, NumericsError> {
    let mut xa = x0;
    let mut xb = x1;
    let mut fa = f(xa);
    if fa.abs() < ftol {
        return Ok(xa);
    }
    let mut fb = f(xb);
    for it in 0..max_iter {
        if fb.abs() < ftol {
            return Ok(xb);
        }
        let denom = fb - fa;
        let mut xn = if denom.abs() > 1e-300 {
            xb - fb * (xb - xa) / denom
        } else {
            0.5 * (xa + xb)
        };
        if !(lo..=hi).contains(&xn) || !xn.is_finite() {
            xn = 0.5 * (xa + xb);
        }
        if (xn - xb).abs() < xtol {
            return Ok(xn);
        }
        xa = xb;
        fa = fb;
        xb = xn;
        fb = f(xb);
        let _ = it;
    }
    Err(NumericsError::NoConvergence {
        what: "secant iteration",
        iterations: max_iter,
        residual: fb.abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_cubic_root() {
        let mut f = |x: f64| x * x * x - 2.0;
        let r = bisect(&mut f, Bracket { a: 0.0, b: 2.0 }, 1e-13, 200).expect("root");
        assert!((r - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn bisection_rejects_bad_bracket() {
        let mut f = |x: f64| x * x + 1.0;
        match bisect(&mut f, Bracket { a: -1.0, b: 1.0 }, 1e-12, 100) {
            Err(NumericsError::NoBracket { .. }) => {}
            other => panic!("expected NoBracket, got {other:?}"),
        }
    }

    #[test]
    fn secant_converges_on_transcendental_root() {
        let mut f = |x: f64| x.cos() - x;
        let r = secant(&mut f, 0.5, 1.0, 0.0, 2.0, 1e-14, 1e-14, 100).expect("root");
        assert!((r.cos() - r).abs() < 1e-12, "residual {:.3e}", r.cos() - r);
    }
}
