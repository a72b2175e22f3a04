//! Sweep of `omega` over one period: the picture of `tau_bar` on the
//! real circle, with every sample tagged by the rotation number at `omega`.

use rayon::prelude::*;

use super::bubble::{BubbleSample, TraceOptions};
use super::tsujii::convergents;
use crate::circle_map::{Lift, Shifted};
use crate::error::{Error, Result};
use crate::real_dynamics::{rotation, Rotation};
use crate::uniformizer::{boundary_tau_with, geometric_ladder};

/// Resolution of the rotation number attached to each sample.
const ATLAS_ROTATION_TOL: f64 = 1e-9;
/// Largest denominator used to label irrational samples.
const LABEL_MAX_Q: u64 = 1000;

/// Label `p/q` of a rotation number: the exact value when rational,
/// otherwise its last convergent with `q <= LABEL_MAX_Q`.
fn label(rot: Rotation) -> (i64, u32) {
    match rot {
        Rotation::Rational { p, q } => (p, q),
        Rotation::Bracket { lo, hi } => {
            let theta = 0.5 * (lo + hi);
            let best = convergents(theta, 64).into_iter().take_while(|&(_, q)| q <= LABEL_MAX_Q).last();
            best.map_or((theta.round() as i64, 1), |(p, q)| (p, q as u32))
        }
    }
}

/// `tau_bar(family + omega)` at `omega = k / samples`, `k = 0..samples`,
/// each extrapolated over the ladder `y_cap, y_cap/2, ...` of `opts.rungs`
/// heights.
pub fn atlas<L: Lift + ?Sized>(family: &L, opts: &TraceOptions) -> Result<Vec<BubbleSample>> {
    if opts.samples == 0 || opts.rungs < 2 {
        return Err(Error::InvalidParameter("need at least one sample and two rungs".into()));
    }
    let ladder = geometric_ladder(opts.y_cap, opts.rungs);
    (0..opts.samples)
        .into_par_iter()
        .map(|k| {
            let omega = k as f64 / opts.samples as f64;
            let (p, q) = label(rotation(&Shifted { base: family, omega }, ATLAS_ROTATION_TOL)?);
            let bv = boundary_tau_with(family, omega, &ladder, &opts.solver)?;
            let mut s = BubbleSample::new(omega, p, q, bv.tau.re, bv.tau.im, bv.error_estimate);
            s.max_residual = bv.samples.iter().map(|r| r.residual).fold(0.0, f64::max);
            Ok(s)
        })
        .collect()
}
