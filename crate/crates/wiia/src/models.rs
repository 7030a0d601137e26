//! The two three-component reaction models studied by this crate, behind a
//! common trait so the stepper, profile solver, and spectral machinery are
//! model-agnostic.
//!
//! Both systems have the form `T u_t = D u_xx + F(u)` with diagonal
//! time-constant matrix `T` and diagonal diffusion `D`. The trait exposes
//! the kinetics `F`, its analytic Jacobian (verified against finite
//! differences by a property test), the two diagonal matrices, and the
//! spatially homogeneous equilibria used as pulse backgrounds.

use crate::numerics::NumericsError;

/// A three-component reaction-diffusion model `T u_t = D u_xx + F(u)`.
pub trait ModelSpec: Sync {
    /// Kinetics `F(y)`.
    fn reaction(&self, y: &[f64; 3]) -> [f64; 3];

    /// Analytic Jacobian `dF/dy`.
    fn jacobian(&self, y: &[f64; 3]) -> [[f64; 3]; 3];

    /// Diagonal diffusion coefficients.
    fn diffusion(&self) -> [f64; 3];

    /// Diagonal time constants `T` (left-hand side of the evolution).
    fn time_constants(&self) -> [f64; 3];

    /// All spatially homogeneous equilibria `F(y) = 0`, ordered by the
    /// first component.
    fn homogeneous_equilibria(&self) -> Vec<[f64; 3]>;

    /// The homogeneous equilibrium with the lowest first component — the
    /// rest state that pulse tails decay onto for both models here.
    fn background(&self) -> Result<[f64; 3], NumericsError> {
        self.homogeneous_equilibria()
            .into_iter()
            .next()
            .ok_or(NumericsError::NoRoot {
                why: "model has no homogeneous equilibrium".to_string(),
            })
    }
}

/// Three-component FitzHugh-Nagumo-type kinetics: a cubic activator `u`
/// with two linear inhibitors `v` (slow, time constant `tau`) and `w`
/// (time constant `theta`).
///
/// `F = (k2 u - u^3 - k3 v - k4 w + k1, u - gamma v, u - w)`.
#[derive(Clone, Copy, Debug)]
pub struct Fhn3 {
    pub d_u: f64,
    pub d_v: f64,
    pub d_w: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub gamma: f64,
    pub theta: f64,
    pub tau: f64,
}

impl Fhn3 {
    /// The parameter set used throughout this crate's pulse studies; only
    /// the inhibitor feedback `k4` and the slow time constant `tau` vary.
    pub fn baseline(k4: f64, tau: f64) -> Self {
        Self {
            d_u: 5.0e-6,
            d_v: 6.5e-4,
            d_w: 7.5e-4,
            k1: -3.0,
            k2: 2.0,
            k3: 2.0,
            k4,
            gamma: 8.0,
            theta: 10.0,
            tau,
        }
    }
}

impl ModelSpec for Fhn3 {
    #[inline]
    fn reaction(&self, y: &[f64; 3]) -> [f64; 3] {
        let [u, v, w] = *y;
        [
            self.k2 * u - u * u * u - self.k3 * v - self.k4 * w + self.k1,
            u - self.gamma * v,
            u - w,
        ]
    }

    #[inline]
    fn jacobian(&self, y: &[f64; 3]) -> [[f64; 3]; 3] {
        let u = y[0];
        [
            [self.k2 - 3.0 * u * u, -self.k3, -self.k4],
            [1.0, -self.gamma, 0.0],
            [1.0, 0.0, -1.0],
        ]
    }

    fn diffusion(&self) -> [f64; 3] {
        [self.d_u, self.d_v, self.d_w]
    }

    fn time_constants(&self) -> [f64; 3] {
        [1.0, self.tau, self.theta]
    }

    fn homogeneous_equilibria(&self) -> Vec<[f64; 3]> {
        // At equilibrium v = u / gamma and w = u, leaving the cubic
        // u^3 - (k2 - k3/gamma - k4) u - k1 = 0.
        let lin = self.k2 - self.k3 / self.gamma - self.k4;
        let mut roots = cubic_real_roots(0.0, -lin, -self.k1);
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        roots
            .into_iter()
            .map(|u| [u, u / self.gamma, u])
            .collect()
    }
}

/// Activator-substrate kinetics with an extra inhibitor `w` that throttles
/// the autocatalysis: the reaction rate is `u v^2 / (1 + f2 w)`.
///
/// `F = (-r + f0 (1 - u), r - (f0 + f1) v, f3 (v - w))` with
/// `r = u v^2 / (1 + f2 w)`.
#[derive(Clone, Copy, Debug)]
pub struct Gs3 {
    pub d_u: f64,
    pub d_v: f64,
    pub d_w: f64,
    pub f0: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
    pub tau: f64,
}

impl Gs3 {
    /// The planar (2-D) demonstration parameter set; feed rate `f1` and
    /// inhibitor time constant `tau` are the knobs left free.
    pub fn planar(f1: f64, tau: f64) -> Self {
        Self {
            d_u: 2.0e-4,
            d_v: 1.0e-4,
            d_w: 5.0e-4,
            f0: 0.05,
            f1,
            f2: 0.50,
            f3: 0.20,
            tau,
        }
    }
}

impl ModelSpec for Gs3 {
    #[inline]
    fn reaction(&self, y: &[f64; 3]) -> [f64; 3] {
        let [u, v, w] = *y;
        let r = u * v * v / (1.0 + self.f2 * w);
        [
            -r + self.f0 * (1.0 - u),
            r - (self.f0 + self.f1) * v,
            self.f3 * (v - w),
        ]
    }

    #[inline]
    fn jacobian(&self, y: &[f64; 3]) -> [[f64; 3]; 3] {
        let [u, v, w] = *y;
        let q = 1.0 + self.f2 * w;
        let r_u = v * v / q;
        let r_v = 2.0 * u * v / q;
        let r_w = -u * v * v * self.f2 / (q * q);
        [
            [-r_u - self.f0, -r_v, -r_w],
            [r_u, r_v - (self.f0 + self.f1), r_w],
            [0.0, self.f3, -self.f3],
        ]
    }

    fn diffusion(&self) -> [f64; 3] {
        [self.d_u, self.d_v, self.d_w]
    }

    fn time_constants(&self) -> [f64; 3] {
        [1.0, 1.0, self.tau]
    }

    fn homogeneous_equilibria(&self) -> Vec<[f64; 3]> {
        // w = v at equilibrium. The trivial state is (1, 0, 0); the
        // nontrivial branch solves a quadratic obtained by eliminating u
        // between the first two kinetics equations:
        //   (f0+f1)/f0 * v^2 + ((f0+f1) f2 - 1) * v + (f0+f1) = 0,
        // with u = 1 - (f0+f1) v / f0.
        let s = self.f0 + self.f1;
        let a = s / self.f0;
        let b = s * self.f2 - 1.0;
        let c = s;
        let mut eq = vec![[1.0, 0.0, 0.0]];
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for v in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                if v.is_finite() {
                    let u = 1.0 - s * v / self.f0;
                    eq.push([u, v, v]);
                }
            }
        }
        eq.sort_by(|p, q| p[0].partial_cmp(&q[0]).unwrap());
        eq
    }
}

/// Real roots of `x^3 + a2 x^2 + a1 x + a0`, by the trigonometric /
/// Cardano closed form with one Newton polish per root. A conjugate pair
/// whose imaginary part is below a tolerance relative to the coefficient
/// scale is treated as a (near-)double real root, matching how a
/// borderline discriminant behaves under roundoff.
pub fn cubic_real_roots(a2: f64, a1: f64, a0: f64) -> Vec<f64> {
    let scale = 1.0 + a2.abs().max(a1.abs()).max(a0.abs());
    let q = (a2 * a2 - 3.0 * a1) / 9.0;
    let r = (2.0 * a2 * a2 * a2 - 9.0 * a2 * a1 + 27.0 * a0) / 54.0;
    let mut roots = Vec::new();
    if r * r < q * q * q {
        // Three real roots (irreducible case), via the cosine form.
        let theta = (r / (q * q * q).sqrt()).acos();
        let m = -2.0 * q.sqrt();
        let third = std::f64::consts::TAU / 3.0;
        roots.push(m * (theta / 3.0).cos() - a2 / 3.0);
        roots.push(m * ((theta + std::f64::consts::TAU) / 3.0).cos() - a2 / 3.0);
        roots.push(m * ((theta / 3.0) - third).cos() - a2 / 3.0);
    } else {
        let big_a = -r.signum() * (r.abs() + (r * r - q * q * q).sqrt()).cbrt();
        let big_b = if big_a != 0.0 { q / big_a } else { 0.0 };
        roots.push(big_a + big_b - a2 / 3.0);
        // The remaining pair is -(A+B)/2 - a2/3 +/- i sqrt(3)(A-B)/2; keep
        // its real part when the pair is real to within the tolerance.
        let im = 3f64.sqrt() * 0.5 * (big_a - big_b);
        if im.abs() < 1e-9 * scale {
            roots.push(-0.5 * (big_a + big_b) - a2 / 3.0);
        }
    }
    for x in &mut roots {
        // Newton polish recovers precision lost to cancellation in the
        // closed form.
        for _ in 0..3 {
            let f = ((*x + a2) * *x + a1) * *x + a0;
            let df = (3.0 * *x + 2.0 * a2) * *x + a1;
            if df.abs() > 1e-300 {
                *x -= f / df;
            }
        }
    }
    // Deduplicate near-multiple roots.
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * scale);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Central finite difference of the kinetics, the oracle for the
    /// analytic Jacobians.
    fn numeric_jacobian(model: &dyn ModelSpec, y: &[f64; 3]) -> [[f64; 3]; 3] {
        let mut j = [[0.0; 3]; 3];
        for col in 0..3 {
            let h = 1e-6 * (1.0 + y[col].abs());
            let mut yp = *y;
            let mut ym = *y;
            yp[col] += h;
            ym[col] -= h;
            let fp = model.reaction(&yp);
            let fm = model.reaction(&ym);
            for row in 0..3 {
                j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        j
    }

    fn assert_jacobian_matches(model: &dyn ModelSpec, y: &[f64; 3]) {
        let analytic = model.jacobian(y);
        let numeric = numeric_jacobian(model, y);
        for r in 0..3 {
            for c in 0..3 {
                let scale = 1.0 + analytic[r][c].abs();
                let diff = (analytic[r][c] - numeric[r][c]).abs() / scale;
                assert!(
                    diff < 1e-6,
                    "Jacobian ({r},{c}) mismatch at {y:?}: analytic {}, numeric {}",
                    analytic[r][c],
                    numeric[r][c]
                );
            }
        }
    }

    proptest! {
        #[test]
        fn cubic_model_jacobian_matches_finite_differences(
            u in -3.0f64..3.0,
            v in -2.0f64..2.0,
            w in -2.0f64..2.0,
            k4 in 2.0f64..3.5,
        ) {
            let model = Fhn3::baseline(k4, 1200.0);
            assert_jacobian_matches(&model, &[u, v, w]);
        }

        #[test]
        fn autocatalytic_model_jacobian_matches_finite_differences(
            u in 0.0f64..1.5,
            v in 0.0f64..1.5,
            w in 0.0f64..1.5,
            f1 in 0.01f64..0.12,
        ) {
            let model = Gs3::planar(f1, 40.0);
            assert_jacobian_matches(&model, &[u, v, w]);
        }

        #[test]
        fn homogeneous_equilibria_zero_the_kinetics(
            k4 in 2.0f64..3.5,
        ) {
            let model = Fhn3::baseline(k4, 1200.0);
            let eqs = model.homogeneous_equilibria();
            prop_assert!(!eqs.is_empty());
            for eq in eqs {
                let f = model.reaction(&eq);
                for c in 0..3 {
                    prop_assert!(f[c].abs() < 1e-9, "residual {} in component {c} at {eq:?}", f[c]);
                }
            }
        }
    }

    #[test]
    fn cubic_roots_recover_constructed_factors() {
        // (x - 1)(x + 2)(x - 0.5) = x^3 + 0.5 x^2 - 2.5 x + 1.
        let roots = cubic_real_roots(0.5, -2.5, 1.0);
        assert_eq!(roots.len(), 3);
        for (got, want) in roots.iter().zip([-2.0, 0.5, 1.0]) {
            assert!((got - want).abs() < 1e-12, "root {got} vs {want}");
        }
        // A case with a single real root: x^3 + x + 10 has root about
        // -2.0408 and a complex pair.
        let roots = cubic_real_roots(0.0, 1.0, 10.0);
        assert_eq!(roots.len(), 1);
        let x = roots[0];
        assert!((x * x * x + x + 10.0).abs() < 1e-10);
    }

    #[test]
    fn pulse_background_is_the_lowest_equilibrium() {
        let model = Fhn3::baseline(3.0, 1200.0);
        let eqs = model.homogeneous_equilibria();
        let bg = model.background().expect("background");
        assert_eq!(eqs[0], bg);
        for eq in &eqs[1..] {
            assert!(eq[0] > bg[0]);
        }
        // The rest state consistency: v = u/gamma, w = u.
        assert!((bg[1] - bg[0] / 8.0).abs() < 1e-12);
        assert!((bg[2] - bg[0]).abs() < 1e-12);
    }

    #[test]
    fn autocatalytic_equilibria_zero_the_kinetics() {
        let model = Gs3::planar(0.057, 40.0);
        for eq in model.homogeneous_equilibria() {
            let f = model.reaction(&eq);
            for c in 0..3 {
                assert!(
                    f[c].abs() < 1e-12,
                    "residual {:.3e} in component {c} at {eq:?}",
                    f[c]
                );
            }
        }
    }
}
