//! Analytic circle diffeomorphisms given by trigonometric-polynomial lifts.
//!
//! A map is stored through its lift `F(x) = x + d(x)` where the displacement
//! `d(x) = a0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x)` is a real
//! trigonometric polynomial. Everything downstream consumes maps through the
//! [`Lift`] trait so that composed maps (`f^q`) and shifted maps (`f + w`) can
//! be passed wherever a plain [`CircleMap`] is accepted.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;

pub type C64 = Complex64;

/// Grid used to validate that a lift is increasing.
const DIFFEO_GRID: usize = 8192;
/// Grid used on each strip boundary line when certifying the half-width.
const STRIP_GRID: usize = 4096;
/// `Re F'` must stay above this on both lines `Im z = +-delta`.
const STRIP_RE_DERIVATIVE_FLOOR: f64 = 0.1;
/// Dyadic resolution of the half-width search, `delta = k / 1024`.
const STRIP_DYADIC_DENOM: u32 = 1024;

/// Value and first two derivatives of a lift at a real point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// The lift `F: R -> R` of an orientation-preserving analytic circle map,
/// with `F(x + 1) = F(x) + 1`.
pub trait Lift: Send + Sync {
    /// `F`, `F'` and `F''` at a real point.
    fn jet(&self, x: f64) -> Jet;

    /// `F(z)` for `|Im z|` below the strip half-width.
    fn eval_complex(&self, z: C64) -> Result<C64>;

    /// Half-width of the complex strip on which the lift is analytic and
    /// univalent.
    fn strip_halfwidth(&self) -> f64;

    fn value(&self, x: f64) -> f64 {
        self.jet(x).value
    }

    fn slope(&self, x: f64) -> f64 {
        self.jet(x).d1
    }
}

/// A real trigonometric-polynomial lift, the on-disk map format.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    mean_shift: f64,
    cos_coeffs: Vec<f64>,
    sin_coeffs: Vec<f64>,
    strip_halfwidth: f64,
    certified: bool,
}

/// JSON map descriptor: `{"mean_shift": .., "cos": [..], "sin": [..]}`.
///
/// `cos[k-1]` and `sin[k-1]` multiply `cos(2 pi k x)` and `sin(2 pi k x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDescriptor {
    pub mean_shift: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl CircleMap {
    /// Builds and validates a map. Fails with `NotADiffeomorphism` when `F'`
    /// is not positive on the validation grid.
    pub fn new(mean_shift: f64, cos_coeffs: Vec<f64>, sin_coeffs: Vec<f64>) -> Result<Self> {
        let finite = mean_shift.is_finite()
            && cos_coeffs.iter().chain(&sin_coeffs).all(|c| c.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("map coefficients must be finite".into()));
        }
        let k = cos_coeffs.len().max(sin_coeffs.len());
        let mut cos_coeffs = cos_coeffs;
        let mut sin_coeffs = sin_coeffs;
        cos_coeffs.resize(k, 0.0);
        sin_coeffs.resize(k, 0.0);
        let mut map = CircleMap {
            mean_shift,
            cos_coeffs,
            sin_coeffs,
            strip_halfwidth: 0.0,
            certified: false,
        };
        let (min_d1, at) = map.min_slope_on_grid(DIFFEO_GRID);
        if min_d1 <= 0.0 {
            return Err(Error::NotADiffeomorphism { min_derivative: min_d1, at });
        }
        // 2 pi sum k(|a_k| + |b_k|) bounds |d'|, so below 1 the map is a
        // diffeomorphism whatever the grid says.
        let derivative_bound: f64 = map
            .cos_coeffs
            .iter()
            .zip(&map.sin_coeffs)
            .enumerate()
            .map(|(i, (a, b))| TAU * (i + 1) as f64 * (a.abs() + b.abs()))
            .sum();
        map.certified = derivative_bound < 1.0;
        map.strip_halfwidth = map.search_strip_halfwidth(min_d1);
        Ok(map)
    }

    /// The rigid rotation `x -> x + theta`.
    pub fn rotation(theta: f64) -> Self {
        CircleMap::new(theta, Vec::new(), Vec::new()).expect("rotations are diffeomorphisms")
    }

    /// `x -> x + mean_shift + b sin(2 pi x)`, the Arnold family member.
    pub fn arnold(mean_shift: f64, b: f64) -> Result<Self> {
        CircleMap::new(mean_shift, vec![0.0], vec![b])
    }

    pub fn from_descriptor(desc: &MapDescriptor) -> Result<Self> {
        CircleMap::new(desc.mean_shift, desc.cos.clone(), desc.sin.clone())
    }

    pub fn descriptor(&self) -> MapDescriptor {
        MapDescriptor {
            mean_shift: self.mean_shift,
            cos: self.cos_coeffs.clone(),
            sin: self.sin_coeffs.clone(),
        }
    }

    pub fn mean_shift(&self) -> f64 {
        self.mean_shift
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.cos_coeffs
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.sin_coeffs
    }

    /// True when `2 pi sum k(|a_k|+|b_k|) < 1`, which proves `F' > 0`.
    pub fn is_certified(&self) -> bool {
        self.certified
    }

    /// True when the displacement is constant.
    pub fn is_rotation(&self) -> bool {
        self.cos_coeffs.iter().chain(&self.sin_coeffs).all(|&c| c == 0.0)
    }

    /// The same displacement with a different constant term. Real shifts
    /// leave `F'` untouched, so the strip certificate is reused.
    pub fn with_mean_shift(&self, mean_shift: f64) -> Self {
        CircleMap { mean_shift, ..self.clone() }
    }

    /// `f_w = f + w` for real `w`.
    pub fn shifted(&self, omega: f64) -> Self {
        self.with_mean_shift(self.mean_shift + omega)
    }

    /// The conjugate map `x -> -f(-x)`.
    pub fn mirrored(&self) -> Self {
        CircleMap {
            mean_shift: -self.mean_shift,
            cos_coeffs: self.cos_coeffs.iter().map(|a| -a).collect(),
            sin_coeffs: self.sin_coeffs.clone(),
            strip_halfwidth: self.strip_halfwidth,
            certified: self.certified,
        }
    }

    /// `F'` or `F''` at a complex point of the strip.
    pub fn derivative(&self, z: C64, order: u8) -> Result<C64> {
        self.check_strip(z)?;
        let (u, v) = unit_powers_base(z);
        let mut up = C64::new(1.0, 0.0);
        let mut vp = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.0, 0.0);
        for (i, (&a, &b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            up *= u;
            vp *= v;
            let w = TAU * (i + 1) as f64;
            let cos_k = (up + vp) * 0.5;
            let sin_k = (up - vp) * C64::new(0.0, -0.5);
            acc += match order {
                1 => (-a * sin_k + b * cos_k) * w,
                2 => (-a * cos_k - b * sin_k) * (w * w),
                _ => return Err(Error::InvalidParameter(format!("derivative order {order}"))),
            };
        }
        Ok(if order == 1 { acc + 1.0 } else { acc })
    }

    fn check_strip(&self, z: C64) -> Result<()> {
        if z.im.abs() >= self.strip_halfwidth {
            return Err(Error::StripExceeded { im: z.im, halfwidth: self.strip_halfwidth });
        }
        Ok(())
    }

    fn min_slope_on_grid(&self, n: usize) -> (f64, f64) {
        (0..n)
            .map(|i| {
                let x = i as f64 / n as f64;
                (self.jet(x).d1, x)
            })
            .fold((f64::INFINITY, 0.0), |acc, v| if v.0 < acc.0 { v } else { acc })
    }

    fn min_re_slope_on_lines(&self, delta: f64) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..STRIP_GRID {
            let x = i as f64 / STRIP_GRID as f64;
            for im in [delta, -delta] {
                let d = self.derivative_unchecked(C64::new(x, im));
                min = min.min(d.re);
            }
        }
        min
    }

    fn derivative_unchecked(&self, z: C64) -> C64 {
        let (u, v) = unit_powers_base(z);
        let mut up = C64::new(1.0, 0.0);
        let mut vp = C64::new(1.0, 0.0);
        let mut acc = C64::new(1.0, 0.0);
        for (i, (&a, &b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            up *= u;
            vp *= v;
            let w = TAU * (i + 1) as f64;
            let cos_k = (up + vp) * 0.5;
            let sin_k = (up - vp) * C64::new(0.0, -0.5);
            acc += (-a * sin_k + b * cos_k) * w;
        }
        acc
    }

    /// Largest dyadic `delta <= 1` with `Re F' > floor` on both strip lines.
    fn search_strip_halfwidth(&self, min_real_slope: f64) -> f64 {
        if self.is_rotation() {
            return 1.0;
        }
        // Maps whose real slope already dips under the floor get a
        // proportionally smaller floor.
        let floor = STRIP_RE_DERIVATIVE_FLOOR.min(0.5 * min_real_slope);
        let ok = |k: u32| self.min_re_slope_on_lines(k as f64 / STRIP_DYADIC_DENOM as f64) > floor;
        if ok(STRIP_DYADIC_DENOM) {
            return 1.0;
        }
        if !ok(1) {
            return 0.5 / STRIP_DYADIC_DENOM as f64;
        }
        let (mut good, mut bad) = (1u32, STRIP_DYADIC_DENOM);
        while bad - good > 1 {
            let mid = (good + bad) / 2;
            if ok(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good as f64 / STRIP_DYADIC_DENOM as f64
    }
}

fn unit_powers_base(z: C64) -> (C64, C64) {
    let u = (C64::new(0.0, TAU) * z).exp();
    (u, u.inv())
}

impl Lift for CircleMap {
    fn jet(&self, x: f64) -> Jet {
        let (s1, c1) = (TAU * x).sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        let mut value = x + self.mean_shift;
        let mut d1 = 1.0;
        let mut d2 = 0.0;
        for (i, (&a, &b)) in self.cos_coeffs.iter().zip(&self.sin_coeffs).enumerate() {
            // angle addition: (c, s) <- (cos, sin) of 2 pi (i+1) x
            let (cn, sn) = (c * c1 - s * s1, s * c1 + c * s1);
            c = cn;
            s = sn;
            let w = TAU * (i + 1) as f64;
            value += a * c + b * s;
            d1 += w * (-a * s + b * c);
            d2 -= w * w * (a * c + b * s);
        }
        Jet { value, d1, d2 }
    }

    fn eval_complex(&self, z: C64) -> Result<C64> {
        self.check_strip(z)?;
        let (u, v) = unit_powers_base(z);
        let mut up = C64::new(1.0, 0.0);
        let mut vp = C64::new(1.0, 0.0);
        let mut acc = z + self.mean_shift;
        for (&a, &b) in self.cos_coeffs.iter().zip(&self.sin_coeffs) {
            up *= u;
            vp *= v;
            acc += (up + vp) * (0.5 * a) + (up - vp) * C64::new(0.0, -0.5 * b);
        }
        Ok(acc)
    }

    fn strip_halfwidth(&self) -> f64 {
        self.strip_halfwidth
    }
}

/// `F(z)` on the strip; `StripExceeded` outside it.
pub fn eval_lift<L: Lift + ?Sized>(map: &L, z: C64) -> Result<C64> {
    map.eval_complex(z)
}

/// A map shifted by a real parameter, `x -> F(x) + omega`.
#[derive(Debug, Clone, Copy)]
pub struct Shifted<'a, L: ?Sized> {
    pub base: &'a L,
    pub omega: f64,
}

impl<L: Lift + ?Sized> Lift for Shifted<'_, L> {
    fn jet(&self, x: f64) -> Jet {
        let j = self.base.jet(x);
        Jet { value: j.value + self.omega, ..j }
    }

    fn eval_complex(&self, z: C64) -> Result<C64> {
        Ok(self.base.eval_complex(z)? + self.omega)
    }

    fn strip_halfwidth(&self) -> f64 {
        self.base.strip_halfwidth()
    }
}

/// `f_w = f + w` for complex `w`: a map from `R/Z` to `R/Z + w`.
#[derive(Debug, Clone, Copy)]
pub struct OffsetMap<'a, L: ?Sized> {
    pub base: &'a L,
    pub offset: C64,
}

impl<'a, L: Lift + ?Sized> OffsetMap<'a, L> {
    pub fn eval(&self, z: C64) -> Result<C64> {
        Ok(self.base.eval_complex(z)? + self.offset)
    }

    /// Real offsets give back a genuine circle map.
    pub fn as_real(&self) -> Option<Shifted<'a, L>> {
        (self.offset.im == 0.0).then_some(Shifted { base: self.base, omega: self.offset.re })
    }
}

pub fn shift<L: Lift + ?Sized>(map: &L, omega: C64) -> OffsetMap<'_, L> {
    OffsetMap { base: map, offset: omega }
}

/// `F^q`, evaluated lazily by composition.
#[derive(Debug, Clone, Copy)]
pub struct Iterate<'a, L: ?Sized> {
    pub base: &'a L,
    pub q: u32,
}

pub fn iterate<L: Lift + ?Sized>(map: &L, q: u32) -> Result<Iterate<'_, L>> {
    if q == 0 {
        return Err(Error::InvalidParameter("iterate count must be positive".into()));
    }
    Ok(Iterate { base: map, q })
}

impl<L: Lift + ?Sized> Lift for Iterate<'_, L> {
    fn jet(&self, x: f64) -> Jet {
        let mut acc = Jet { value: x, d1: 1.0, d2: 0.0 };
        for _ in 0..self.q {
            let j = self.base.jet(acc.value);
            acc = Jet {
                value: j.value,
                d1: j.d1 * acc.d1,
                d2: j.d2 * acc.d1 * acc.d1 + j.d1 * acc.d2,
            };
        }
        acc
    }

    fn value(&self, x: f64) -> f64 {
        (0..self.q).fold(x, |y, _| self.base.value(y))
    }

    fn eval_complex(&self, z: C64) -> Result<C64> {
        (0..self.q).try_fold(z, |w, _| self.base.eval_complex(w))
    }

    fn strip_halfwidth(&self) -> f64 {
        self.base.strip_halfwidth()
    }
}

/// `D_f`, the circle integral of `|F''/F'|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionConstant {
    pub value: f64,
    pub quadrature_error: f64,
}

/// `D_f` by adaptive Gauss-Kronrod quadrature over `[0, 1]`.
pub fn total_distortion<L: Lift + ?Sized>(map: &L) -> Result<DistortionConstant> {
    total_distortion_from(map, 0.0)
}

/// `D_f` integrated over the period `[start, start + 1]`. Different starts
/// exercise different subdivisions of the same integral.
pub fn total_distortion_from<L: Lift + ?Sized>(map: &L, start: f64) -> Result<DistortionConstant> {
    let (min_d1, at) = (0..DIFFEO_GRID)
        .map(|i| {
            let x = start + i as f64 / DIFFEO_GRID as f64;
            (map.slope(x), x)
        })
        .fold((f64::INFINITY, 0.0), |acc, v| if v.0 < acc.0 { v } else { acc });
    if min_d1 <= 0.0 {
        return Err(Error::NotADiffeomorphism { min_derivative: min_d1, at });
    }
    let integrand = |x: f64| {
        let j = map.jet(x);
        (j.d2 / j.d1).abs()
    };
    // The integrand has kinks at the zeros of F''; integrate piecewise.
    let breaks = quadrature::sign_changes(|x| map.jet(x).d2, start, start + 1.0, 4096);
    let mut knots = vec![start];
    knots.extend(breaks);
    knots.push(start + 1.0);
    let mut value = 0.0;
    let mut err = 0.0;
    for w in knots.windows(2) {
        let (v, e) = quadrature::adaptive_gauss_kronrod(&integrand, w[0], w[1], 1e-13);
        value += v;
        err += e;
    }
    Ok(DistortionConstant { value, quadrature_error: err })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arnold() -> CircleMap {
        CircleMap::arnold(0.0, 1.0 / (4.0 * std::f64::consts::PI)).unwrap()
    }

    #[test]
    fn rotation_evaluation() {
        let r = CircleMap::rotation(0.25);
        let v = eval_lift(&r, C64::new(0.1, 0.0)).unwrap();
        assert!((v.re - 0.35).abs() < 1e-15 && v.im == 0.0);
        assert_eq!(r.derivative(C64::new(0.3, 0.2), 1).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn arnold_values_and_slopes() {
        let f = arnold();
        assert!(f.value(0.0).abs() < 1e-16);
        let expected = 0.25 + 1.0 / (4.0 * std::f64::consts::PI);
        assert!((f.value(0.25) - expected).abs() < 1e-15);
        assert!((f.value(0.25) - 0.329577).abs() < 1e-6);
        assert!((f.slope(0.0) - 1.5).abs() < 1e-14);
        assert!((f.slope(0.5) - 0.5).abs() < 1e-14);
        let z = f.derivative(C64::new(0.0, 0.0), 1).unwrap();
        assert!((z.re - 1.5).abs() < 1e-14);
    }

    #[test]
    fn complex_and_real_evaluations_agree() {
        let f = CircleMap::new(0.1, vec![0.02, -0.01], vec![0.05, 0.015]).unwrap();
        for i in 0..50 {
            let x = i as f64 / 37.0 - 0.4;
            let j = f.jet(x);
            let z = C64::new(x, 0.0);
            assert!((f.eval_complex(z).unwrap().re - j.value).abs() < 1e-13);
            assert!((f.derivative(z, 1).unwrap().re - j.d1).abs() < 1e-12);
            assert!((f.derivative(z, 2).unwrap().re - j.d2).abs() < 1e-10);
        }
    }

    #[test]
    fn strip_is_enforced() {
        let f = arnold();
        let delta = f.strip_halfwidth();
        assert!(delta > 0.1 && delta < 0.25, "delta = {delta}");
        let err = eval_lift(&f, C64::new(0.0, delta)).unwrap_err();
        assert_eq!(err.name(), "StripExceeded");
        assert!(f.derivative(C64::new(0.0, -delta * 1.01), 2).is_err());
    }

    #[test]
    fn arnold_strip_matches_closed_form() {
        // Re F'(x + i d) = 1 + cos(2 pi x) cosh(2 pi d) / 2, minimal at x = 1/2.
        let f = arnold();
        let exact = (1.8f64).acosh() / TAU;
        let delta = f.strip_halfwidth();
        assert!(delta <= exact && exact - delta <= 1.0 / 1024.0);
    }

    #[test]
    fn rejects_folding_maps() {
        let err = CircleMap::arnold(0.0, 0.2).unwrap_err();
        assert_eq!(err.name(), "NotADiffeomorphism");
    }

    #[test]
    fn shift_behaviour() {
        let f = arnold();
        let g = shift(&f, C64::new(0.0, 0.1));
        for i in 0..20 {
            let x = i as f64 / 20.0;
            assert!((g.eval(C64::new(x, 0.0)).unwrap().im - 0.1).abs() < 1e-15);
        }
        let same = shift(&f, C64::new(0.0, 0.0)).as_real().unwrap();
        assert_eq!(same.value(0.3), f.value(0.3));
        assert!((f.shifted(0.25).value(0.0) - 0.25).abs() < 1e-16);
    }

    #[test]
    fn iterates() {
        let r = CircleMap::rotation(0.3);
        let it = iterate(&r, 5).unwrap();
        assert!((it.value(0.1) - 1.6).abs() < 1e-14);
        let f = arnold();
        let once = iterate(&f, 1).unwrap();
        assert_eq!(once.jet(0.3), f.jet(0.3));
        // fixed point 0 with multiplier 3/2
        let twice = iterate(&f, 2).unwrap();
        assert!((twice.slope(0.0) - 2.25).abs() < 1e-13);
        assert!(iterate(&f, 0).is_err());
    }

    #[test]
    fn iterate_complex_leaves_strip() {
        let f = arnold();
        let it = iterate(&f, 3).unwrap();
        assert!(it.eval_complex(C64::new(0.0, 0.18)).is_err());
    }

    #[test]
    fn distortion_of_rotation_is_zero() {
        let d = total_distortion(&CircleMap::rotation(0.37)).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn distortion_of_arnold_map() {
        let d = total_distortion(&arnold()).unwrap();
        assert!((d.value - 2.0 * 3f64.ln()).abs() < 1e-10, "{d:?}");
        assert!(d.quadrature_error <= 1e-10);
    }

    #[test]
    fn distortion_decreases_with_amplitude() {
        let mut last = f64::INFINITY;
        for b in [0.05, 0.02, 0.01, 0.001, 1e-5] {
            let d = total_distortion(&CircleMap::arnold(0.0, b).unwrap()).unwrap().value;
            assert!(d < last);
            // integrand ~ 4 pi^2 b |sin| for small b, integral 8 pi b
            if b <= 1e-3 {
                assert!((d / (8.0 * std::f64::consts::PI * b) - 1.0).abs() < 0.05);
            }
            last = d;
        }
    }

    #[test]
    fn mirrored_map_conjugates() {
        let f = CircleMap::new(0.13, vec![0.02, 0.01], vec![0.05, -0.02]).unwrap();
        let m = f.mirrored();
        for i in 0..30 {
            let x = i as f64 / 30.0;
            assert!((m.value(x) + f.value(-x)).abs() < 1e-14);
        }
    }
}
