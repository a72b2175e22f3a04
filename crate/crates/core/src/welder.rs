//! The welding constant `C_f`.
//!
//! Gluing the closed upper and lower half-cylinders along `R/Z` by `f`
//! gives a sphere with two punctures, uniformized by maps
//! `phi+(z) = z + C+ + o(1)` on the upper side and `phi-(z) = z + C- + o(1)`
//! on the lower side with `phi- o f = phi+` on `R/Z`. The mismatch
//! `C_f = C+ - C-` does not depend on the additive gauge and is the limit of
//! `tau_f(w) - w` as `Im w -> +infinity`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::circle_map::{Lift, C64};
use crate::error::{Error, Result};
use crate::spectral::{Basis, Column, SpectralSystem};
use crate::uniformizer::{complex_rotation_number, min_collocation};

/// Heights below this are outside the asymptotic regime.
pub const ASYMPTOTE_MIN_HEIGHT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldingSolution {
    pub c_plus: C64,
    pub c_minus: C64,
    pub c_f: C64,
    /// Coefficients of `e^{2 pi i k z}`, `k = 1..N`, in `phi+`.
    pub coeff_plus: Vec<C64>,
    /// Coefficients of `e^{-2 pi i k z}`, `k = 1..N`, in `phi-`.
    pub coeff_minus: Vec<C64>,
    pub residual: f64,
    pub n: usize,
    pub m: usize,
}

/// Flat JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeldReport {
    pub c_f_re: f64,
    pub c_f_im: f64,
    pub residual: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl WeldingSolution {
    pub fn report(&self) -> WeldReport {
        WeldReport { c_f_re: self.c_f.re, c_f_im: self.c_f.im, residual: self.residual, n: self.n, m: self.m }
    }
}

/// Solves the welding equation with the gauge `C+ = 0`.
pub fn welding_constant<L: Lift + ?Sized>(map: &L, n: usize, m: usize) -> Result<WeldingSolution> {
    welding_constant_gauged(map, n, m, C64::new(0.0, 0.0))
}

/// Solves `f(x_j) + C- + sum b_k e^{-2 pi i k f(x_j)} = x_j + C+ + sum a_k e^{2 pi i k x_j}`
/// in least squares with `C+` fixed.
pub fn welding_constant_gauged<L: Lift + ?Sized>(
    map: &L,
    n: usize,
    m: usize,
    c_plus: C64,
) -> Result<WeldingSolution> {
    if m < min_collocation(n) {
        return Err(Error::InvalidParameter(format!("M = {m} is below 4N+4 = {}", min_collocation(n))));
    }
    let mf = m as f64;
    let fx: Vec<f64> = (0..m).map(|j| map.value(j as f64 / mf)).collect();
    let rhs: Vec<C64> = (0..m).map(|j| C64::new(j as f64 / mf - fx[j], 0.0) + c_plus).collect();
    let system = SpectralSystem::new(&fx, rhs, n);
    let one = C64::new(1.0, 0.0);
    let mut cols: Vec<Column> = Vec::with_capacity(2 * n + 1);
    for k in 1..=n as i64 {
        cols.push(vec![(-one, Basis::E(k))]);
    }
    for k in 1..=n as i64 {
        cols.push(vec![(one, Basis::P(-k))]);
    }
    cols.push(vec![(one, Basis::E(0))]);
    let (sol, _) = system.solve(&cols)?;
    let residual = system.residual(&cols, &sol);
    let c_minus = sol[2 * n];
    Ok(WeldingSolution {
        c_plus,
        c_minus,
        c_f: c_plus - c_minus,
        coeff_plus: sol[..n].to_vec(),
        coeff_minus: sol[n..2 * n].to_vec(),
        residual,
        n,
        m,
    })
}

/// `|tau_f(iy) - iy - C_f|` for each height, with `tau` from the torus
/// solver at the same `N`, `M` as the welding solve.
pub fn asymptote_check<L: Lift + ?Sized>(map: &L, weld: &WeldingSolution, heights: &[f64]) -> Result<Vec<f64>> {
    for pair in heights.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidParameter("heights must strictly increase".into()));
        }
    }
    heights
        .iter()
        .map(|&y| {
            if y < ASYMPTOTE_MIN_HEIGHT {
                return Err(Error::HeightBelowMinimum { height: y, minimum: ASYMPTOTE_MIN_HEIGHT });
            }
            let w = C64::new(0.0, y);
            let sol = complex_rotation_number(map, w, weld.n, weld.m)?;
            // compare in H/Z: pick the lift of tau nearest iy + C_f
            let target = w + weld.c_f;
            let t = sol.tau.lift_near(target.re);
            Ok((t - target).norm())
        })
        .collect()
}

/// `phi+(x) - phi-(f(x))` at a real point, for diagnostics.
pub fn welding_defect<L: Lift + ?Sized>(map: &L, sol: &WeldingSolution, x: f64) -> C64 {
    let fx = map.value(x);
    let plus: C64 = sol
        .coeff_plus
        .iter()
        .enumerate()
        .map(|(i, a)| a * C64::from_polar(1.0, TAU * (i + 1) as f64 * x))
        .sum();
    let minus: C64 = sol
        .coeff_minus
        .iter()
        .enumerate()
        .map(|(i, b)| b * C64::from_polar(1.0, -TAU * (i + 1) as f64 * fx))
        .sum();
    (x + sol.c_plus + plus) - (fx + sol.c_minus + minus)
}
