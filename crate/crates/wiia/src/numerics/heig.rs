//! Eigenvalues of small real upper-Hessenberg matrices by complex
//! single-shift QR with Wilkinson shifts and a hard iteration cap.
//!
//! The dense Schur decomposition in nalgebra iterates without a bound and
//! has been observed to generate NaNs mid-iteration and cycle forever on
//! finite Hessenberg input. Every projected eigenproblem in this crate is
//! small (Krylov projections of a few dozen rows), so an explicit shifted
//! QR sweep at O(n^2) per step is cheap, and the cap turns any stagnation
//! into a reportable error instead of a hang.
//!
//! Method: the real matrix is complexified once; the active trailing block
//! is shrunk by standard deflation (negligible subdiagonal relative to its
//! neighbors), 1x1 and 2x2 blocks are resolved in closed form, and each
//! sweep applies an explicitly shifted Givens QR step `A - sigma I = Q R`,
//! `A' = R Q + sigma I` restricted to the active block. The shift is the
//! Wilkinson choice (trailing 2x2 eigenvalue nearest the corner entry),
//! replaced every twelfth stalled sweep by an exceptional perturbation to
//! break the symmetric cycles that defeat a pure Wilkinson strategy.

use super::NumericsError;
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Deflation threshold relative to the neighboring diagonal entries.
const DEFLATE_EPS: f64 = f64::EPSILON;
/// Sweeps allowed per deflation before the iteration is declared stuck.
const SWEEPS_PER_EIGENVALUE: usize = 60;

/// Eigenvalues (unordered) of a real upper-Hessenberg matrix. Entries
/// below the first subdiagonal are ignored.
pub fn hessenberg_eigenvalues(h: &DMatrix<f64>) -> Result<Vec<Complex64>, NumericsError> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(NumericsError::DimensionMismatch {
            what: format!("Hessenberg eigenvalue input is {}x{}", n, h.ncols()),
        });
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(NumericsError::NoConvergence {
            what: "Hessenberg QR (non-finite input)",
            iterations: 0,
            residual: f64::NAN,
        });
    }
    let mut a = DMatrix::<Complex64>::from_fn(n, n, |i, j| {
        if j + 1 >= i {
            Complex64::new(h[(i, j)], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    complex_hessenberg_eigenvalues(&mut a)
}

/// The two eigenvalues of `[[p, q], [r, s]]`, computed through the larger
/// root of the characteristic polynomial so the smaller one is obtained
/// stably from the determinant.
fn eig2(p: Complex64, q: Complex64, r: Complex64, s: Complex64) -> (Complex64, Complex64) {
    let half_tr = 0.5 * (p + s);
    let det = p * s - q * r;
    let disc = (0.5 * (p - s) * (0.5 * (p - s)) + q * r).sqrt();
    let big = if (half_tr + disc).norm() >= (half_tr - disc).norm() {
        half_tr + disc
    } else {
        half_tr - disc
    };
    if big.norm() == 0.0 {
        (big, big)
    } else {
        (big, det / big)
    }
}

/// Givens rotation `[[c, s], [-conj(s), c]]` with real `c >= 0` mapping
/// `(f, g)` to `(r, 0)`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let h = fa.hypot(ga);
    (fa / h, f * g.conj() / (fa * h))
}

fn complex_hessenberg_eigenvalues(
    a: &mut DMatrix<Complex64>,
) -> Result<Vec<Complex64>, NumericsError> {
    let n = a.nrows();
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    let mut hi = n;
    let mut stalled = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Shrink the active block: find the highest l whose subdiagonal
        // entry is negligible next to its diagonal neighbors.
        let mut l = hi - 1;
        while l > 0 {
            let scale = a[(l - 1, l - 1)].norm() + a[(l, l)].norm();
            let scale = if scale == 0.0 {
                a[(l, l - 1)].norm().max(1.0)
            } else {
                scale
            };
            if a[(l, l - 1)].norm() <= DEFLATE_EPS * scale {
                a[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            eigs.push(a[(hi - 1, hi - 1)]);
            hi -= 1;
            stalled = 0;
            continue;
        }
        if l == hi - 2 {
            let (e1, e2) = eig2(a[(l, l)], a[(l, l + 1)], a[(l + 1, l)], a[(l + 1, l + 1)]);
            eigs.push(e1);
            eigs.push(e2);
            hi -= 2;
            stalled = 0;
            continue;
        }
        stalled += 1;
        total += 1;
        if stalled > SWEEPS_PER_EIGENVALUE || total > SWEEPS_PER_EIGENVALUE * n {
            return Err(NumericsError::NoConvergence {
                what: "Hessenberg QR eigenvalue iteration",
                iterations: total,
                residual: a[(hi - 1, hi - 2)].norm(),
            });
        }
        let mut shift = {
            let (e1, e2) = eig2(
                a[(hi - 2, hi - 2)],
                a[(hi - 2, hi - 1)],
                a[(hi - 1, hi - 2)],
                a[(hi - 1, hi - 1)],
            );
            let corner = a[(hi - 1, hi - 1)];
            if (e1 - corner).norm() <= (e2 - corner).norm() {
                e1
            } else {
                e2
            }
        };
        if stalled % 12 == 0 {
            // Exceptional shift: a pure Wilkinson strategy cycles on
            // permutation-like blocks (e.g. nilpotent companions).
            shift += Complex64::new(
                1.5 * (a[(hi - 1, hi - 2)].norm() + a[(hi - 2, hi - 3)].norm()),
                0.0,
            );
        }
        for i in l..hi {
            a[(i, i)] -= shift;
        }
        // Forward Givens pass: eliminate the subdiagonal, recording the
        // rotations; R overwrites the block.
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - l - 1);
        for i in l..hi - 1 {
            let (c, s) = givens(a[(i, i)], a[(i + 1, i)]);
            for j in i..hi {
                let t1 = a[(i, j)];
                let t2 = a[(i + 1, j)];
                a[(i, j)] = c * t1 + s * t2;
                a[(i + 1, j)] = -s.conj() * t1 + c * t2;
            }
            a[(i + 1, i)] = Complex64::new(0.0, 0.0);
            rots.push((c, s));
        }
        // Backward pass: A' = R Q with Q = G_l^H ... G_{hi-2}^H applied
        // left to right, which restores Hessenberg form.
        for (offset, &(c, s)) in rots.iter().enumerate() {
            let i = l + offset;
            for r in l..(i + 2).min(hi) {
                let t1 = a[(r, i)];
                let t2 = a[(r, i + 1)];
                a[(r, i)] = c * t1 + s.conj() * t2;
                a[(r, i + 1)] = -s * t1 + c * t2;
            }
        }
        for i in l..hi {
            a[(i, i)] += shift;
        }
    }
    Ok(eigs)
}
