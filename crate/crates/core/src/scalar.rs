//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra::{Complex, RealField};
use num_traits::ToPrimitive;

/// Real floating-point scalar the library is generic over (`f32` or `f64`).
///
/// Complex matrix entries are `Complex<T>`. Tolerances in the public API are
/// quoted for `f64`; [`Real::tol`] rescales them to the precision of `Self`.
pub trait Real: RealField + Copy + ToPrimitive + Debug + Display + Default {
    /// Machine epsilon of the concrete type.
    const EPSILON: f64;

    /// Lossless-enough conversion from an `f64` literal.
    fn of(x: f64) -> Self;

    /// Rescale an `f64` tolerance to this type's precision.
    fn tol(nominal: f64) -> Self {
        Self::of(nominal * (Self::EPSILON / f64::EPSILON).max(1.0))
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn infinity() -> Self;
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    #[inline]
    fn of(x: f64) -> Self {
        x
    }

    fn infinity() -> Self {
        f64::INFINITY
    }
}

impl Real for f32 {
    const EPSILON: f64 = f32::EPSILON as f64;

    #[inline]
    fn of(x: f64) -> Self {
        x as f32
    }

    fn infinity() -> Self {
        f32::INFINITY
    }
}

/// Complex matrix entry.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn real<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}
