//! Banded LU factorization with partial pivoting, generic over real and
//! complex scalars.
//!
//! Storage follows the usual band convention: an `n x n` matrix with `kl`
//! subdiagonals and `ku` superdiagonals is kept column-major in a
//! `(2*kl + ku + 1) x n` panel, the extra `kl` rows on top holding fill-in
//! produced by row interchanges. Factoring an operator with bandwidth ~10
//! on a few thousand unknowns costs microseconds, which is what makes the
//! Newton/continuation/eigenvalue loops in this crate cheap enough to run
//! inside tests.
//!
//! Row interchanges are confined to the band, so the growth factor is
//! bounded as in dense partial pivoting and the factorization is backward
//! stable; callers that stack borders on top (see
//! [`super::bordered`]) add one step of iterative refinement to recover
//! accuracy lost to block elimination near singular corners.

use super::scalar::Scalar;
use super::NumericsError;
use num_complex::Complex64;

/// Pivots below this magnitude are treated as exact breakdown. The
/// threshold only guards against dividing by a subnormal; genuinely
/// ill-conditioned systems are the caller's concern.
const PIVOT_BREAKDOWN: f64 = 1e-300;

/// Column-major banded matrix with room reserved for pivoting fill-in.
#[derive(Clone, Debug)]
pub struct BandedMatrix<T: Scalar> {
    n: usize,
    kl: usize,
    ku: usize,
    /// Leading dimension of the storage panel: `2*kl + ku + 1`.
    ldab: usize,
    /// Panel data; entry `(i, j)` lives at `j * ldab + (kl + ku + i - j)`.
    data: Vec<T>,
}

impl<T: Scalar> BandedMatrix<T> {
    /// An all-zero matrix with the given half-bandwidths.
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0, "empty matrix");
        let ldab = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            ldab,
            data: vec![T::ZERO; ldab * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(i + self.ku + self.kl >= j && j + self.kl >= i, "outside storage band");
        j * self.ldab + (self.kl + self.ku + i - j)
    }

    /// True if `(i, j)` lies inside the declared band (not the fill region).
    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && i + self.ku >= j && j + self.kl >= i
    }

    /// Entry `(i, j)`, zero outside the band.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            T::ZERO
        }
    }

    /// Overwrite entry `(i, j)`. Panics outside the declared band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band (kl = {}, ku = {})",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] = value;
    }

    /// Accumulate into entry `(i, j)`. Panics outside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band (kl = {}, ku = {})",
            self.kl,
            self.ku
        );
        let k = self.idx(i, j);
        self.data[k] += value;
    }

    /// Add `value` to every diagonal entry (used to form `A - sigma I`).
    pub fn add_diagonal(&mut self, value: T) {
        for j in 0..self.n {
            let k = self.idx(j, j);
            self.data[k] += value;
        }
    }

    /// `y = A x` using the declared band only.
    pub fn matvec(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let jmin = i.saturating_sub(self.kl);
            let jmax = (i + self.ku).min(self.n - 1);
            let mut acc = T::ZERO;
            for j in jmin..=jmax {
                acc += self.data[self.idx(i, j)] * x[j];
            }
            y[i] = acc;
        }
    }

    /// The transpose as a new banded matrix (`kl` and `ku` swap roles).
    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n, self.ku, self.kl);
        for j in 0..self.n {
            // Rows stored in column j run from j - ku to j + kl.
            let imin = j.saturating_sub(self.ku);
            let imax = (j + self.kl).min(self.n - 1);
            for i in imin..=imax {
                t.set(j, i, self.data[self.idx(i, j)]);
            }
        }
        t
    }

    /// Largest entry magnitude; a cheap scale estimate for residual tests.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for j in 0..self.n {
            let imin = j.saturating_sub(self.ku);
            let imax = (j + self.kl).min(self.n - 1);
            for i in imin..=imax {
                m = m.max(self.data[self.idx(i, j)].modulus());
            }
        }
        m
    }

    /// LU-factor a copy of the matrix with partial pivoting.
    pub fn factor(&self) -> Result<BandFactor<T>, NumericsError> {
        let mut work = self.clone();
        let n = work.n;
        let kl = work.kl;
        let kv = work.kl + work.ku;
        let mut ipiv = vec![0usize; n];

        for j in 0..n {
            let jmax = (j + kl).min(n - 1);
            let mut p = j;
            let mut pmag = work.data[work.idx(j, j)].modulus();
            for i in (j + 1)..=jmax {
                let m = work.data[work.idx(i, j)].modulus();
                if m > pmag {
                    pmag = m;
                    p = i;
                }
            }
            ipiv[j] = p;
            if pmag < PIVOT_BREAKDOWN {
                return Err(NumericsError::SingularMatrix { column: j, pivot: pmag });
            }
            let kend = (j + kv).min(n - 1);
            if p != j {
                for k in j..=kend {
                    let a = work.idx(p, k);
                    let b = work.idx(j, k);
                    work.data.swap(a, b);
                }
            }
            let piv = work.data[work.idx(j, j)];
            for i in (j + 1)..=jmax {
                let ii = work.idx(i, j);
                work.data[ii] = work.data[ii] / piv;
            }
            for k in (j + 1)..=kend {
                let ujk = work.data[work.idx(j, k)];
                if ujk != T::ZERO {
                    for i in (j + 1)..=jmax {
                        let mult = work.data[work.idx(i, j)];
                        let ik = work.idx(i, k);
                        work.data[ik] -= mult * ujk;
                    }
                }
            }
        }

        Ok(BandFactor {
            n,
            kl,
            kv,
            ldab: work.ldab,
            data: work.data,
            ipiv,
        })
    }
}

impl BandedMatrix<f64> {
    /// Promote to complex entries (for factoring `A - sigma I` with a
    /// complex shift).
    pub fn to_complex(&self) -> BandedMatrix<Complex64> {
        BandedMatrix {
            n: self.n,
            kl: self.kl,
            ku: self.ku,
            ldab: self.ldab,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    /// `y = A x` for a complex vector, using real band entries.
    pub fn matvec_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let jmin = i.saturating_sub(self.kl);
            let jmax = (i + self.ku).min(self.n - 1);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in jmin..=jmax {
                acc += x[j] * self.data[self.idx(i, j)];
            }
            y[i] = acc;
        }
    }
}

/// Banded product `C = A B`; the half-bandwidths add.
pub fn multiply<T: Scalar>(a: &BandedMatrix<T>, b: &BandedMatrix<T>) -> BandedMatrix<T> {
    assert_eq!(a.n, b.n, "dimension mismatch in banded product");
    let n = a.n;
    let mut c = BandedMatrix::zeros(n, a.kl + b.kl, a.ku + b.ku);
    for i in 0..n {
        let jmin = i.saturating_sub(c.kl);
        let jmax = (i + c.ku).min(n - 1);
        for j in jmin..=jmax {
            let kmin = i.saturating_sub(a.kl).max(j.saturating_sub(b.ku));
            let kmax = (i + a.ku).min(j + b.kl).min(n - 1);
            let mut acc = T::ZERO;
            for k in kmin..=kmax {
                acc += a.get(i, k) * b.get(k, j);
            }
            if acc != T::ZERO {
                c.set(i, j, acc);
            }
        }
    }
    c
}

/// The `P A = L U` factorization of a banded matrix.
#[derive(Clone, Debug)]
pub struct BandFactor<T: Scalar> {
    n: usize,
    kl: usize,
    /// Superdiagonals of `U` including fill: `kl + ku`.
    kv: usize,
    ldab: usize,
    data: Vec<T>,
    ipiv: Vec<usize>,
}

impl<T: Scalar> BandFactor<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        // Same panel layout as the unfactored matrix: offset kl + ku + i - j
        // with kv = kl + ku; U's fill rows occupy offsets 0..kl.
        j * self.ldab + (self.kv + i - j)
    }

    /// Solve `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        // Forward: apply interchanges and the unit lower-triangular factor.
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(p, j);
            }
            let bj = b[j];
            if bj != T::ZERO {
                let imax = (j + self.kl).min(n - 1);
                for i in (j + 1)..=imax {
                    let delta = self.data[self.idx(i, j)] * bj;
                    b[i] -= delta;
                }
            }
        }
        // Backward: solve with U (bandwidth kv after fill).
        for j in (0..n).rev() {
            let x = b[j] / self.data[self.idx(j, j)];
            b[j] = x;
            if x != T::ZERO {
                let imin = j.saturating_sub(self.kv);
                for i in imin..j {
                    let delta = self.data[self.idx(i, j)] * x;
                    b[i] -= delta;
                }
            }
        }
    }

    /// Solve `A x = b` into a new vector.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
