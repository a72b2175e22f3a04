//! Values of `tau` in `H/Z` and the hyperbolic metric used to compare them.

use serde::{Deserialize, Serialize};

use crate::circle_map::C64;
use crate::error::{Error, Result};

/// A point of the closed upper half-plane modulo `Z`, with the
/// representative `re` in `[0, 1)`. Boundary values have `im == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperHalfPoint {
    pub re: f64,
    pub im: f64,
}

impl UpperHalfPoint {
    pub fn new(z: C64) -> Result<Self> {
        if !(z.im >= 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NotInUpperHalfPlane { re: z.re, im: z.im });
        }
        let mut re = z.re.rem_euclid(1.0);
        if re >= 1.0 {
            re = 0.0;
        }
        Ok(UpperHalfPoint { re, im: z.im })
    }

    pub fn value(self) -> C64 {
        C64::new(self.re, self.im)
    }

    /// The representative whose real part is closest to `target`.
    pub fn lift_near(self, target: f64) -> C64 {
        C64::new(self.re + (target - self.re).round(), self.im)
    }
}

fn check(z: C64) -> Result<()> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NotInUpperHalfPlane { re: z.re, im: z.im });
    }
    Ok(())
}

/// Poincare distance `arccosh(1 + |z-w|^2 / (2 Im z Im w))`.
pub fn hyperbolic_distance(z: C64, w: C64) -> Result<f64> {
    check(z)?;
    check(w)?;
    // 2 asinh form: no cancellation for nearby points.
    Ok(2.0 * ((z - w).norm() / (2.0 * (z.im * w.im).sqrt())).asinh())
}

/// Distance between the classes of `z` and `w` in `H/Z`.
pub fn quotient_distance(z: C64, w: C64) -> Result<f64> {
    let n0 = (z.re - w.re).round();
    let mut best = f64::INFINITY;
    for d in [-1.0, 0.0, 1.0] {
        best = best.min(hyperbolic_distance(z, w + (n0 + d))?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn reference_distances() {
        assert_eq!(hyperbolic_distance(c(0.0, 1.0), c(0.0, 1.0)).unwrap(), 0.0);
        let d = hyperbolic_distance(c(0.0, 1.0), c(0.0, 2.0)).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-15);
        let d = hyperbolic_distance(c(0.0, 1.0), c(1.0, 1.0)).unwrap();
        assert!((d - 1.5f64.acosh()).abs() < 1e-15);
        assert!((d - 0.962424).abs() < 1e-6);
    }

    #[test]
    fn quotient_uses_nearest_translate() {
        let a = c(0.05, 1.0);
        let b = c(0.95, 1.0);
        let q = quotient_distance(a, b).unwrap();
        assert!(q < hyperbolic_distance(a, b).unwrap());
        assert!((q - hyperbolic_distance(a, c(-0.05, 1.0)).unwrap()).abs() < 1e-14);
        assert!(quotient_distance(a, c(7.05, 1.0)).unwrap() < 1e-12);
    }

    #[test]
    fn rejects_points_off_the_half_plane() {
        let e = hyperbolic_distance(c(0.0, 0.0), c(0.0, 1.0)).unwrap_err();
        assert_eq!(e.name(), "NotInUpperHalfPlane");
        assert!(UpperHalfPoint::new(c(0.0, -1.0)).is_err());
    }

    #[test]
    fn representative_is_normalized() {
        let p = UpperHalfPoint::new(c(-0.25, 0.5)).unwrap();
        assert!((p.re - 0.75).abs() < 1e-15);
        let p = UpperHalfPoint::new(c(-1e-18, 0.0)).unwrap();
        assert!(p.re >= 0.0 && p.re < 1.0);
        assert!((UpperHalfPoint::new(c(0.9, 0.1)).unwrap().lift_near(0.0).re + 0.1).abs() < 1e-15);
    }

    #[test]
    fn inversion_is_an_isometry() {
        let (a, b) = (c(0.2, 0.7), c(-1.3, 0.1));
        let d1 = hyperbolic_distance(a, b).unwrap();
        let d2 = hyperbolic_distance(-a.inv(), -b.inv()).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }
}
