//! Minimal scalar abstraction so the banded LU and bordered elimination can
//! be written once and used with both real (`f64`) and complex
//! (`Complex<f64>`) entries. Complex factorizations are needed for
//! shift-invert with a complex shift; everything else runs in real
//! arithmetic.

use num_complex::Complex64;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Field scalar with a magnitude, as needed by LU with partial pivoting.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    const ZERO: Self;
    const ONE: Self;

    /// Magnitude used for pivot selection and breakdown detection.
    fn modulus(self) -> f64;

    /// Embed a real number.
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;
    const ONE: Self = 1.0;

    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }

    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);
    const ONE: Self = Complex64::new(1.0, 0.0);

    #[inline]
    fn modulus(self) -> f64 {
        // `norm` (not `norm_sqr`): pivot comparisons must not overflow for
        // well-scaled entries, and the cost is irrelevant next to the solve.
        self.norm()
    }

    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}
