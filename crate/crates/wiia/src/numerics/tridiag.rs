//! Thomas-algorithm factors for strictly diagonally dominant tridiagonal
//! systems, plus the cyclic (periodic-wrap) variant via Sherman-Morrison.
//!
//! The implicit-diffusion half of the IMEX stepper solves the same matrix
//! `I - r * Lap` hundreds of thousands of times, so the forward-elimination
//! coefficients are computed once and reused; each solve is then a single
//! O(n) sweep. No pivoting is performed — the diffusion matrices are
//! strictly diagonally dominant M-matrices, for which plain elimination is
//! unconditionally backward stable. The constructor rejects systems that
//! break down, so misuse on non-dominant input fails loudly rather than
//! silently losing accuracy.

use super::NumericsError;

/// Reusable factorization of a tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct TridiagFactor {
    /// Subdiagonal `a[i]`: coupling of row `i + 1` to column `i`.
    lower: Vec<f64>,
    /// Modified superdiagonal from forward elimination.
    cprime: Vec<f64>,
    /// Reciprocals of the elimination denominators.
    dinv: Vec<f64>,
}

impl TridiagFactor {
    /// Factor a tridiagonal matrix with diagonal `diag` (length `n`),
    /// subdiagonal `lower` (length `n - 1`, entry `i` in row `i + 1`) and
    /// superdiagonal `upper` (length `n - 1`, entry `i` in row `i`).
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self, NumericsError> {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(lower.len(), n.saturating_sub(1));
        assert_eq!(upper.len(), n.saturating_sub(1));
        let mut cprime = vec![0.0; n.saturating_sub(1)];
        let mut dinv = vec![0.0; n];
        let mut d = diag[0];
        if d.abs() < 1e-300 {
            return Err(NumericsError::SingularMatrix { column: 0, pivot: d.abs() });
        }
        dinv[0] = 1.0 / d;
        for i in 1..n {
            cprime[i - 1] = upper[i - 1] * dinv[i - 1];
            d = diag[i] - lower[i - 1] * cprime[i - 1];
            if d.abs() < 1e-300 {
                return Err(NumericsError::SingularMatrix { column: i, pivot: d.abs() });
            }
            dinv[i] = 1.0 / d;
        }
        Ok(Self {
            lower: lower.to_vec(),
            cprime,
            dinv,
        })
    }

    pub fn n(&self) -> usize {
        self.dinv.len()
    }

    /// Solve in place with the cached factors.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n();
        assert_eq!(b.len(), n);
        b[0] *= self.dinv[0];
        for i in 1..n {
            b[i] = (b[i] - self.lower[i - 1] * b[i - 1]) * self.dinv[i];
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.cprime[i] * b[i + 1];
        }
    }
}

/// Reusable factorization of a cyclic tridiagonal matrix (periodic wrap
/// entries in the two corners), by Sherman-Morrison on top of a plain
/// Thomas factor.
#[derive(Clone, Debug)]
pub struct CyclicTridiagFactor {
    base: TridiagFactor,
    /// `z = T^{-1} u` for the rank-one update `M = T + u v^T`.
    z: Vec<f64>,
    /// `v` is nonzero only at both ends; store those two entries.
    v0: f64,
    vn: f64,
    /// `1 / (1 + v^T z)`.
    denom_inv: f64,
}

impl CyclicTridiagFactor {
    /// Factor a cyclic tridiagonal matrix. All three slices have length
    /// `n >= 3`: `diag[i]` is the diagonal, `lower[i]` couples row `i` to
    /// column `i - 1 mod n` (so `lower[0]` is the top-right corner), and
    /// `upper[i]` couples row `i` to column `i + 1 mod n` (so
    /// `upper[n - 1]` is the bottom-left corner).
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self, NumericsError> {
        let n = diag.len();
        assert!(n >= 3, "cyclic solve needs at least 3 unknowns");
        assert_eq!(lower.len(), n);
        assert_eq!(upper.len(), n);

        let e = lower[0]; // entry (0, n-1)
        let f = upper[n - 1]; // entry (n-1, 0)
        // gamma = -diag[0] avoids cancellation in the modified corners.
        let gamma = -diag[0];
        let mut d = diag.to_vec();
        d[0] -= gamma;
        d[n - 1] -= e * f / gamma;
        let base = TridiagFactor::new(&lower[1..], &d, &upper[..n - 1])?;

        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = f;
        let mut z = u;
        base.solve_in_place(&mut z);
        let v0 = 1.0;
        let vn = e / gamma;
        let denom = 1.0 + v0 * z[0] + vn * z[n - 1];
        if denom.abs() < 1e-300 {
            return Err(NumericsError::SingularMatrix { column: 0, pivot: denom.abs() });
        }
        Ok(Self {
            base,
            z,
            v0,
            vn,
            denom_inv: 1.0 / denom,
        })
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    /// Solve in place with the cached factors.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n();
        assert_eq!(b.len(), n);
        self.base.solve_in_place(b);
        let factor = (self.v0 * b[0] + self.vn * b[n - 1]) * self.denom_inv;
        for i in 0..n {
            b[i] -= factor * self.z[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOL: f64 = 1e-12;

    #[test]
    fn thomas_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 50;
        let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 4.0 + rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let factor = TridiagFactor::new(&lower, &diag, &upper).expect("factor");
        let mut x = b.clone();
        factor.solve_in_place(&mut x);

        let dense = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if i == j + 1 {
                lower[j]
            } else if j == i + 1 {
                upper[i]
            } else {
                0.0
            }
        });
        let xd = dense.lu().solve(&DVector::from_column_slice(&b)).unwrap();
        let err = x
            .iter()
            .zip(xd.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err < TOL, "thomas vs dense mismatch {err:.3e}");
    }

    #[test]
    fn cyclic_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 40;
        // Diffusion-like dominant cyclic system with random perturbations.
        let lower: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.5..1.0)).collect();
        let upper: Vec<f64> = (0..n).map(|_| -rng.gen_range(0.5..1.0)).collect();
        let diag: Vec<f64> = (0..n).map(|_| 3.0 + rng.gen_range(0.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();

        let factor = CyclicTridiagFactor::new(&lower, &diag, &upper).expect("factor");
        let mut x = b.clone();
        factor.solve_in_place(&mut x);

        let dense = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                diag[i]
            } else if j == (i + n - 1) % n {
                lower[i]
            } else if j == (i + 1) % n {
                upper[i]
            } else {
                0.0
            }
        });
        let xd = dense.lu().solve(&DVector::from_column_slice(&b)).unwrap();
        let err = x
            .iter()
            .zip(xd.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(err < TOL, "cyclic vs dense mismatch {err:.3e}");
    }

    #[test]
    fn factor_is_reusable_across_right_hand_sides() {
        let n = 16;
        let lower = vec![-1.0; n - 1];
        let upper = vec![-1.0; n - 1];
        let diag = vec![3.0; n];
        let factor = TridiagFactor::new(&lower, &diag, &upper).expect("factor");
        for k in 0..3 {
            let b: Vec<f64> = (0..n).map(|i| ((i + k) as f64).sin()).collect();
            let mut x = b.clone();
            factor.solve_in_place(&mut x);
            // Verify by explicit residual.
            for i in 0..n {
                let mut r = diag[i] * x[i] - b[i];
                if i > 0 {
                    r += lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    r += upper[i] * x[i + 1];
                }
                assert!(r.abs() < TOL, "residual {r:.3e} at row {i}, rhs {k}");
            }
        }
    }
}
