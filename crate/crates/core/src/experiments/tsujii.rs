//! Parameter gaps of rational approximants and the measure of parameters
//! with well-approximable rotation numbers.

use serde::{Deserialize, Serialize};

use super::bubble::plateau_bracket;
use crate::circle_map::{total_distortion, CircleMap, Lift, Shifted};
use crate::error::{Error, Result};
use crate::real_dynamics::{gcd, plateau, rotation, rotation_relative_to, Rotation};

/// Tolerance of rotation numbers used by the searches here.
pub const ROTATION_TOL: f64 = 1e-12;
/// Slack below zero still counted as equality in the gap inequality.
pub const GAP_TOL: f64 = 1e-10;
/// Relative precision of neighbourhood edges in the measure estimate.
const MEASURE_RELATIVE_TOL: f64 = 1e-4;

/// Whether the lifted rotation number of `family + omega` is below `t`.
fn rotation_below<L: Lift + ?Sized>(family: &L, omega: f64, t: f64, tol: f64) -> Result<bool> {
    Ok(match rotation_relative_to(&Shifted { base: family, omega }, t, tol)? {
        Rotation::Rational { p, q } => (p as f64) < t * q as f64,
        Rotation::Bracket { lo, hi } => {
            if hi <= t {
                true
            } else if lo >= t {
                false
            } else {
                0.5 * (lo + hi) < t
            }
        }
    })
}

/// Interval of `omega` containing the crossing of the lifted rotation
/// number of `family + omega` through `target`, after at most `steps`
/// bisection steps; bisection also stops once the interval is below the
/// rotation tolerance.
fn crossing_interval<L: Lift + ?Sized>(family: &L, target: f64, steps: usize, tol: f64) -> Result<(f64, f64)> {
    let (mut lo, mut hi) = omega_bracket(family, target);
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            break;
        }
        if rotation_below(family, mid, target, tol)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// `omega` range outside which the rotation number of `family + omega`
/// is certainly on one side of `target`.
fn omega_bracket<L: Lift + ?Sized>(family: &L, target: f64) -> (f64, f64) {
    // plateau_bracket with p/q = target
    let (lo, hi) = plateau_bracket(family, 0, 1);
    (lo + target, hi + target)
}

/// A parameter `omega` with `rot(family + omega) = target` (lifted).
pub fn locate_rotation<L: Lift + ?Sized>(family: &L, target: f64) -> Result<f64> {
    let (lo, hi) = crossing_interval(family, target, 200, ROTATION_TOL)?;
    Ok(0.5 * (lo + hi))
}

/// `map` with its mean shift adjusted so that its rotation number is `target`.
pub fn tune_mean_shift(map: &CircleMap, target: f64) -> Result<CircleMap> {
    let omega = locate_rotation(map, target)?;
    Ok(map.with_mean_shift(map.mean_shift() + omega))
}

/// Continued-fraction convergents `p_k/q_k`, `k = 1..=depth`, of `theta`.
pub fn convergents(theta: f64, depth: usize) -> Vec<(i64, u64)> {
    let (mut h0, mut h1) = (1i64, theta.floor() as i64);
    let (mut k0, mut k1) = (0u64, 1u64);
    let mut x = theta - theta.floor();
    let mut out = Vec::with_capacity(depth);
    for _ in 0..depth {
        if x <= 0.0 {
            break;
        }
        let y = 1.0 / x;
        let a = y.floor();
        x = y - a;
        // stop once the denominators leave the integer range
        let ai = a as i64;
        let (Some(h), Some(k)) = (
            ai.checked_mul(h1).and_then(|v| v.checked_add(h0)),
            (ai as u64).checked_mul(k1).and_then(|v| v.checked_add(k0)),
        ) else {
            break;
        };
        (h0, h1) = (h1, h);
        (k0, k1) = (k1, k);
        out.push((h1, k1));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsujiiReport {
    pub p: i64,
    pub q: u32,
    /// Lifted rotation number of the map.
    pub theta: f64,
    /// `|theta - p/q|`.
    pub gap: f64,
    /// The plateau edge of `p/q` facing `omega = 0`.
    pub omega0: f64,
    /// `e^{D_f} |theta - p/q|`.
    pub bound: f64,
    /// `bound - |omega0|`.
    pub slack: f64,
    pub passes: bool,
}

/// For each approximant `p/q` of `rot(map)`, the nearest parameter `omega0`
/// with `rot(map + omega0) = p/q`, against the bound `e^{D_f} |theta - p/q|`.
pub fn tsujii_gap<L: Lift + ?Sized>(map: &L, depth: usize) -> Result<Vec<TsujiiReport>> {
    let (lo, hi) = match rotation(map, ROTATION_TOL)? {
        Rotation::Bracket { lo, hi } => (lo, hi),
        Rotation::Rational { p, q } => {
            return Err(Error::InvalidParameter(format!("rotation number is rational ({p}/{q})")));
        }
    };
    let theta = 0.5 * (lo + hi);
    let c = total_distortion(map)?.value.exp();
    let approximants = convergents(theta, depth);
    // p/q can only be trusted while 1/q^2 exceeds the resolution
    if let Some(&(_, q)) = approximants.iter().find(|&&(_, q)| (q as f64).powi(2) * ROTATION_TOL > 1.0) {
        return Err(Error::NoConvergence { lo, hi, iterations: q });
    }
    let mut out = Vec::new();
    for (p, q) in approximants {
        let q = q as u32;
        let pl = plateau(map, p, q, plateau_bracket(map, p, q))?;
        let frac = p as f64 / q as f64;
        let omega0 = if frac < theta { pl.omega_hi } else { pl.omega_lo };
        let gap = (theta - frac).abs();
        let bound = c * gap;
        let slack = bound - omega0.abs();
        out.push(TsujiiReport { p, q, theta, gap, omega0, bound, slack, passes: slack >= -GAP_TOL });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleTerm {
    pub q: u32,
    /// Summed widths of `{omega : |rot - p/q| < q^{-(2+beta)}}` over `p`.
    pub measured: f64,
    /// `2 e^{D_f} / q^{1+beta}`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleReport {
    pub beta: f64,
    pub measure: f64,
    pub bound: f64,
    pub terms: Vec<LiouvilleTerm>,
    pub passes: bool,
}

/// Upper estimate of the measure of `omega` in one period whose rotation
/// number is within `q^{-(2+beta)}` of some `p/q` with `q <= q_max`. Each
/// neighbourhood is an interval whose ends are located by `steps` bisection
/// steps.
pub fn liouville_measure_estimate<L: Lift + ?Sized>(
    family: &L,
    beta: f64,
    steps: usize,
    q_max: u32,
) -> Result<LiouvilleReport> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let c = total_distortion(family)?.value.exp();
    let tol = (MEASURE_RELATIVE_TOL * (q_max.max(1) as f64).powf(-(2.0 + beta))).max(ROTATION_TOL);
    let mut terms = Vec::new();
    for q in 1..=q_max {
        let r = (q as f64).powf(-(2.0 + beta));
        let mut measured = 0.0;
        for p in 0..q as i64 {
            if gcd(p, q as i64) != 1 {
                continue;
            }
            let frac = p as f64 / q as f64;
            // outer ends keep the estimate an upper bound
            let left = crossing_interval(family, frac - r, steps, tol)?.0;
            let right = crossing_interval(family, frac + r, steps, tol)?.1;
            measured += right - left;
        }
        terms.push(LiouvilleTerm { q, measured, bound: 2.0 * c / (q as f64).powf(1.0 + beta) });
    }
    let measure = terms.iter().map(|t| t.measured).sum();
    let bound = terms.iter().map(|t| t.bound).sum();
    Ok(LiouvilleReport { beta, measure, bound, terms, passes: measure <= bound })
}
