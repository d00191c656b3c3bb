//! Real and complex scalar helpers that work with and without `std`.

use faer::c64;

pub const PI: f64 = core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}

#[inline]
pub fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}

#[inline]
pub fn asinh(x: f64) -> f64 {
    libm::asinh(x)
}

/// Modulus of a complex number.
#[inline]
pub fn cabs(z: c64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `1 / z`, computed with Smith's scaling.
#[inline]
pub fn cinv(z: c64) -> c64 {
    if z.re.abs() >= z.im.abs() {
        let r = z.im / z.re;
        let d = z.re + z.im * r;
        c64::new(1.0 / d, -r / d)
    } else {
        let r = z.re / z.im;
        let d = z.re * r + z.im;
        c64::new(r / d, -1.0 / d)
    }
}

#[inline]
pub fn real(x: f64) -> c64 {
    c64::new(x, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cinv_matches_division() {
        for &(re, im) in &[(1.0, 0.0), (0.0, 2.0), (3.0, -4.0), (-1e-3, 7.0)] {
            let z = c64::new(re, im);
            let w = cinv(z) * z;
            assert!((w.re - 1.0).abs() < 1e-15 && w.im.abs() < 1e-15);
        }
    }
}
