//! Scalar abstraction for the simulation kernel.
//!
//! The state vector, gate storage and the gate-application kernel are generic
//! over any IEEE float that implements [`Real`]. Linear algebra that needs a
//! factorization (eigen/SVD) works on `f64` only.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::Debug;

/// Floating point types the simulation kernel can run on (`f32`, `f64`).
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static {
    /// Converts from `f64`, panicking only for non-representable values which
    /// cannot occur for the supported float types.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    /// Lossy conversion to `f64`.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a real scalar.
pub type Cplx<T> = Complex<T>;

/// Double precision complex number used throughout the `f64` API.
pub type C64 = Complex<f64>;

/// Shorthand constructor for a double precision complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Converts a complex value between float widths.
#[inline]
pub fn cast_c<T: Real, U: Real>(z: Complex<T>) -> Complex<U> {
    Complex::new(U::of(z.re.to_f64_lossy()), U::of(z.im.to_f64_lossy()))
}
