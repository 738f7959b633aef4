//! Float functions routed through `num_traits::Float` so the crate builds
//! without `std` (libm backs them there).

use num_traits::Float;

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    Float::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    Float::abs(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    Float::sin(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    Float::cos(x)
}

#[inline]
pub(crate) fn atan(x: f64) -> f64 {
    Float::atan(x)
}

#[inline]
pub(crate) fn atan2(y: f64, x: f64) -> f64 {
    Float::atan2(y, x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    Float::hypot(x, y)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    Float::round(x)
}

pub(crate) fn pow2(k: i32) -> f64 {
    <f64 as Float>::powi(2.0, k)
}
