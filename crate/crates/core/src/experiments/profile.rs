//! The two-humped scenario: a family whose displacement `x - f(x)` has two
//! local maxima `y1 < y2`, so that the `0/1` plateau contains a hyperbolic
//! component `(y1, y2)` with a complex left end and a real right end.

use serde::{Deserialize, Serialize};

use super::bubble::{trace_component, ComponentTrace, TraceOptions};
use crate::circle_map::{CircleMap, Lift};
use crate::error::{Error, Result};
use crate::real_dynamics::golden_max;

/// Grid used to locate the local maxima of `x - f(x)`.
const PROFILE_GRID: usize = 4096;
/// Innermost samples forming each germ.
const GERM_SAMPLES: usize = 5;

/// `x -> x - (c1 sin 2 pi x + c2 sin 4 pi x)`.
pub fn two_humped_family(c1: f64, c2: f64) -> Result<CircleMap> {
    CircleMap::new(0.0, vec![], vec![-c1, -c2])
}

/// Local maxima `(x, value)` of `x - f(x)` over the circle, sorted by value.
pub fn displacement_maxima<L: Lift + ?Sized>(family: &L) -> Vec<(f64, f64)> {
    let n = PROFILE_GRID;
    let h = 1.0 / n as f64;
    let d = |x: f64| x - family.value(x);
    let vals: Vec<f64> = (0..n).map(|i| d(i as f64 * h)).collect();
    let mut out: Vec<(f64, f64)> = (0..n)
        .filter(|&i| vals[i] > vals[(i + n - 1) % n] && vals[i] >= vals[(i + 1) % n])
        .map(|i| {
            let (x, v) = golden_max(&d, i as f64 * h - h, i as f64 * h + h);
            (x.rem_euclid(1.0), v)
        })
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoninjectivityReport {
    /// Lower local maximum of `x - f(x)`: the complex end.
    pub y1: f64,
    /// Higher local maximum: the real end.
    pub y2: f64,
    pub trace: ComponentTrace,
    /// `(Re, Im)` of the innermost samples at each end, edge first, with
    /// the real part lifted near 0.
    pub left_germ: Vec<[f64; 2]>,
    pub right_germ: Vec<[f64; 2]>,
    /// Tangency angle of the innermost left sample.
    pub left_angle: f64,
    /// Horocycle height of the innermost right sample.
    pub right_height: f64,
    /// `|left_angle| < 0.1`: the curve leaves 0 along the positive reals.
    pub tangent_at_left: bool,
    /// `right_height < 1e-2`: the curve enters horocycles at 0.
    pub horocycle_at_right: bool,
}

/// Traces the component `(y1, y2)` of the `0/1` plateau and collects the
/// two germs at 0.
pub fn noninjectivity_probe<L: Lift + ?Sized>(family: &L, opts: &TraceOptions) -> Result<NoninjectivityReport> {
    let maxima = displacement_maxima(family);
    if maxima.len() != 2 {
        return Err(Error::WrongProfile { reason: format!("x - f(x) has {} local maxima, expected 2", maxima.len()) });
    }
    let (y1, y2) = (maxima[0].1, maxima[1].1);
    if !(y2 - y1 > 1e-9) {
        return Err(Error::WrongProfile { reason: format!("local maxima {y1} and {y2} are not distinct") });
    }
    let trace = trace_component(family, 0, 1, (y1, y2, 2), opts)?;
    let germ = |idx: &mut dyn Iterator<Item = usize>| -> Vec<[f64; 2]> {
        idx.take(GERM_SAMPLES)
            .map(|i| {
                let s = &trace.samples[i];
                [s.tau_re - s.tau_re.round(), s.tau_im]
            })
            .collect()
    };
    let n = trace.samples.len();
    let left_germ = germ(&mut (0..n));
    let right_germ = germ(&mut (0..n).rev());
    let left_angle = trace.samples[0].tangency_angle;
    let right_height = trace.samples[n - 1].horocycle_height;
    Ok(NoninjectivityReport {
        y1,
        y2,
        left_germ,
        right_germ,
        left_angle,
        right_height,
        tangent_at_left: left_angle.abs() < 0.1,
        horocycle_at_right: right_height < 1e-2,
        trace,
    })
}
