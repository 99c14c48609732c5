//! Generic real/complex scalar support.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Complex number over a generic real scalar.
pub type Cx<T> = Complex<T>;

/// Real scalar the whole crate is generic over (`f32` or `f64`).
///
/// Verification tolerances are specified for `f64`; `f32` instantiations are
/// type-correct but will not meet them.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + nalgebra::RealField
    + Copy
    + Send
    + Sync
    + std::fmt::Debug
    + std::fmt::Display
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn of(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("finite f64 converts to scalar")
    }

    fn to_f64(self) -> f64;
}

impl Real for f32 {
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Real for f64 {
    fn to_f64(self) -> f64 {
        self
    }
}

/// Complex literal from `f64` parts.
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Cx::new(T::of(re), T::of(im))
}

/// `i` as a complex scalar.
pub fn i<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::one())
}

/// `i * pi`.
pub fn i_pi<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::PI())
}

/// Real part of the larger of two magnitudes, used for residual scales.
pub fn max_t<T: Real>(a: T, b: T) -> T {
    if a > b {
        a
    } else {
        b
    }
}
