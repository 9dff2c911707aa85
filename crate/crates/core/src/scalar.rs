use std::fmt;

use nalgebra::RealField;
use num_traits::ToPrimitive;

/// Real scalar the numeric code is generic over.
///
/// Implemented for `f32` and `f64`. Default tolerances (for instance the
/// `1e-8` numerical-rank cutoff) are tuned for `f64`; callers working in
/// `f32` should loosen them.
pub trait Scalar: RealField + Copy + ToPrimitive + fmt::LowerExp {
    /// Machine epsilon of the type.
    fn epsilon() -> Self;

    /// Whether the value is neither NaN nor infinite.
    fn finite(self) -> bool;
}

impl Scalar for f32 {
    fn epsilon() -> Self {
        f32::EPSILON
    }

    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f64 {
    fn epsilon() -> Self {
        f64::EPSILON
    }

    fn finite(self) -> bool {
        self.is_finite()
    }
}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Scalar>(v: f64) -> T {
    nalgebra::convert(v)
}

/// Lossy conversion to `f64` for reporting.
#[inline]
pub fn to_f64<T: Scalar>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
