//! Float helpers that work without `std`.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}

#[inline]
pub(crate) fn sin_cos(x: f64) -> (f64, f64) {
    libm::sincos(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Splits a nonnegative real into integer and fractional parts, snapping
/// values within a few ulps of an integer onto it so that lattice points
/// produced by float division land exactly on the lattice.
pub(crate) fn floor_frac(x: f64) -> (usize, f64) {
    let r = round(x);
    if abs(x - r) <= 1e-12 * r.max(1.0) {
        (r as usize, 0.0)
    } else {
        let f = floor(x);
        (f as usize, x - f)
    }
}
