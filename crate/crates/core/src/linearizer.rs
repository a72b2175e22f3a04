//! Linearizing (Schroeder) charts at hyperbolic periodic points and the
//! quantities built from them: the modulus sum `sigma`, the bubble-disk
//! radius, the gluing distortion of `xi_j` and the modulus estimates.
//!
//! All charts are for `g = F^q - p`, whose fixed points `alpha_j` are the
//! periodic points of `f`. The chart `phi_j` conjugates multiplication by
//! `rho_j = g'(alpha_j)` to `g` and is normalized by `phi_j'(0) = 1`.
//! Inverse charts are evaluated by pushing `x` towards `alpha_j` (forward
//! iterates for attracting points, inverse-branch iterates for repelling
//! ones) and finishing with a cubic local chart.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle_map::{iterate, total_distortion, Iterate, Lift, C64};
use crate::error::{Error, Result};
use crate::hyperbolic::{quotient_distance, UpperHalfPoint};
use crate::real_dynamics::{find_cycles, gcd, Cycle, CycleKind, TOL_PAR};

/// Iterates stop once `|x - alpha|` is below this.
const CHART_ETA: f64 = 1e-4;
/// Iteration cap for chart evaluation.
pub const CHART_MAX_ITERATIONS: usize = 100_000;
/// Grid on `[x_j, g(x_j)]` used to measure the distortion of `xi_j`.
const XI_GRID: usize = 256;

/// `phi^{-1}(x)` and its derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartValue {
    pub value: f64,
    pub derivative: f64,
    pub iterations: usize,
}

/// Linearizing chart of `g = F^q - p` at a fixed point `alpha` (a lift).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub alpha: f64,
    pub rho: f64,
    p: i64,
    q: u32,
    c2: f64,
    c3: f64,
}

impl Chart {
    pub fn new<L: Lift + ?Sized>(map: &L, alpha: f64, p: i64, q: u32) -> Result<Self> {
        let g = iterate(map, q)?;
        let j = g.jet(alpha);
        let rho = j.d1;
        if !((rho - 1.0).abs() > TOL_PAR) {
            return Err(Error::NotHyperbolic { reason: format!("multiplier {rho} at {alpha}") });
        }
        let h = 1e-4;
        let d3 = (g.jet(alpha + h).d2 - g.jet(alpha - h).d2) / (2.0 * h);
        let (a2, a3) = (0.5 * j.d2, d3 / 6.0);
        // psi(z) = z + c2 z^2 + c3 z^3 solves psi(g(z)) = rho psi(z) to O(z^4)
        let c2 = a2 / (rho * (1.0 - rho));
        let c3 = (a3 + 2.0 * rho * a2 * c2) / (rho * (1.0 - rho * rho));
        Ok(Chart { alpha, rho, p, q, c2, c3 })
    }

    pub fn is_attracting(&self) -> bool {
        self.rho < 1.0
    }

    /// The same chart at `alpha + shift` (an integer shift).
    pub fn shifted(&self, shift: f64) -> Self {
        Chart { alpha: self.alpha + shift, ..*self }
    }

    fn psi(&self, z: f64) -> (f64, f64) {
        (z + z * z * (self.c2 + self.c3 * z), 1.0 + z * (2.0 * self.c2 + 3.0 * self.c3 * z))
    }

    /// `phi^{-1}(x)` for `x` in the basin of `alpha` (same lift).
    pub fn inverse<L: Lift + ?Sized>(&self, map: &L, x: f64) -> Result<ChartValue> {
        let g = Iterate { base: map, q: self.q };
        let shift = self.p as f64;
        let a = self.alpha;
        let z0 = x - a;
        if z0 == 0.0 {
            return Ok(ChartValue { value: 0.0, derivative: 1.0, iterations: 0 });
        }
        let step0 = g.value(x) - shift - x;
        let toward = step0.signum() != z0.signum();
        if toward != self.is_attracting() || step0 == 0.0 {
            let (lo, hi) = self.basin(map);
            return Err(Error::OutsideBasin { x, lo, hi });
        }
        let mut y = x;
        let mut z = z0;
        let mut deriv = 1.0;
        let mut n = 0usize;
        if self.is_attracting() {
            while z.abs() > CHART_ETA {
                let j = g.jet(y);
                deriv *= j.d1;
                y = j.value - shift;
                let nz = y - a;
                if !(nz.abs() < z.abs()) {
                    let (lo, hi) = self.basin(map);
                    return Err(Error::OutsideBasin { x, lo, hi });
                }
                z = nz;
                n += 1;
                if n > CHART_MAX_ITERATIONS {
                    return Err(Error::NotConverged { iterations: n });
                }
            }
            let (v, dv) = self.psi(z);
            let scale = self.rho.powi(-(n as i32));
            Ok(ChartValue { value: scale * v, derivative: scale * dv * deriv, iterations: n })
        } else {
            while z.abs() > CHART_ETA {
                let prev = y;
                y = self.inverse_branch(&g, shift, prev);
                deriv /= g.slope(y);
                z = y - a;
                n += 1;
                if n > CHART_MAX_ITERATIONS {
                    return Err(Error::NotConverged { iterations: n });
                }
            }
            let (v, dv) = self.psi(z);
            let scale = self.rho.powi(n as i32);
            Ok(ChartValue { value: scale * v, derivative: scale * dv * deriv, iterations: n })
        }
    }

    /// The `s` between `alpha` and `t` with `g(s) = t`.
    fn inverse_branch<L: Lift + ?Sized>(&self, g: &Iterate<'_, L>, shift: f64, t: f64) -> f64 {
        let a = self.alpha;
        let (mut lo, mut hi) = if t > a { (a, t) } else { (t, a) };
        let mut s = a + (t - a) / self.rho;
        for _ in 0..100 {
            let j = g.jet(s);
            let r = j.value - shift - t;
            if r == 0.0 {
                return s;
            }
            if r > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let newton = s - r / j.d1;
            let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - s).abs() <= 1e-16 * (1.0 + s.abs()) || hi - lo <= 1e-16 * (1.0 + s.abs()) {
                return next;
            }
            s = next;
        }
        s
    }

    /// The interval between the neighbouring fixed points of `g`.
    fn basin<L: Lift + ?Sized>(&self, map: &L) -> (f64, f64) {
        let g = Iterate { base: map, q: self.q };
        let shift = self.p as f64;
        let d = |y: f64| g.value(y) - shift - y;
        let steps = 1024;
        let side = |dir: f64| -> f64 {
            let start = self.alpha + dir * 1e-6;
            let s0 = d(start).signum();
            for i in 1..=steps {
                let y = self.alpha + dir * i as f64 / steps as f64;
                if d(y).signum() != s0 {
                    let prev = self.alpha + dir * (i - 1) as f64 / steps as f64;
                    return crate::quadrature::bisect(&d, prev.min(y), prev.max(y), 1e-14);
                }
            }
            self.alpha + dir
        };
        (side(-1.0), side(1.0))
    }
}

/// `phi_j^{-1}(x)` for the point `alpha_j` of `cycle` nearest to `x`.
pub fn linearizing_inverse<L: Lift + ?Sized>(map: &L, cycle: &Cycle, x: f64) -> Result<f64> {
    let alpha = cycle
        .points
        .iter()
        .map(|&a| a + (x - a).round())
        .min_by(|a, b| (a - x).abs().total_cmp(&(b - x).abs()))
        .ok_or_else(|| Error::InvalidParameter("empty cycle".into()))?;
    let chart = Chart::new(map, alpha, cycle.winding, cycle.period)?;
    Ok(chart.inverse(map, x)?.value)
}

/// The ordered periodic points of a hyperbolic map with their charts and
/// marker points.
#[derive(Debug, Clone)]
pub struct ChartSystem {
    pub p: i64,
    pub q: u32,
    /// Increasing lifts `alpha_0 < ... < alpha_{K-1} < alpha_0 + 1`, with
    /// `alpha_j` attracting exactly when `j` is even.
    pub alphas: Vec<f64>,
    pub charts: Vec<Chart>,
    /// `x_j` in `(alpha_j, alpha_{j+1})`.
    pub markers: Vec<f64>,
}

impl ChartSystem {
    pub fn new<L: Lift + ?Sized>(map: &L, p: i64, q: u32) -> Result<Self> {
        let cycles = match find_cycles(map, p, q) {
            Err(Error::RootFindingIncomplete { .. }) => {
                return Err(Error::NotHyperbolic { reason: "periodic points are not isolated".into() })
            }
            other => other?,
        };
        if let Some(c) = cycles.iter().find(|c| c.kind == CycleKind::Parabolic) {
            return Err(Error::NotHyperbolic { reason: format!("parabolic cycle with multiplier {}", c.multiplier) });
        }
        let mut pts: Vec<(f64, CycleKind)> =
            cycles.iter().flat_map(|c| c.points.iter().map(move |&x| (x, c.kind))).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let k = pts.len();
        let first = pts
            .iter()
            .position(|t| t.1 == CycleKind::Attracting)
            .ok_or_else(|| Error::NotHyperbolic { reason: "no attracting cycle".into() })?;
        let alphas: Vec<f64> =
            (0..k).map(|i| pts[(first + i) % k].0 + if first + i >= k { 1.0 } else { 0.0 }).collect();
        for (i, idx) in (0..k).map(|i| (i, (first + i) % k)) {
            let expected = if i % 2 == 0 { CycleKind::Attracting } else { CycleKind::Repelling };
            if pts[idx].1 != expected {
                return Err(Error::NotHyperbolic { reason: "cycle types do not alternate".into() });
            }
        }
        let charts = alphas.iter().map(|&a| Chart::new(map, a, p, q)).collect::<Result<Vec<_>>>()?;
        let g = Iterate { base: map, q };
        let markers = (0..k)
            .map(|j| {
                let lo = alphas[j];
                let hi = if j + 1 < k { alphas[j + 1] } else { alphas[0] + 1.0 };
                let x = 0.5 * (lo + hi);
                let gx = g.value(x) - p as f64;
                let ordered = if j % 2 == 0 { lo < gx && gx < x } else { x < gx && gx < hi };
                if ordered {
                    x
                } else {
                    gx
                }
            })
            .collect();
        Ok(ChartSystem { p, q, alphas, charts, markers })
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    /// Chart `j` taken cyclically, lifted so that it sits next to chart
    /// `j - 1`.
    fn chart(&self, j: isize) -> Chart {
        let k = self.len() as isize;
        let shift = j.div_euclid(k) as f64;
        self.charts[j.rem_euclid(k) as usize].shifted(shift)
    }

    fn marker(&self, j: isize) -> f64 {
        let k = self.len() as isize;
        self.markers[j.rem_euclid(k) as usize] + j.div_euclid(k) as f64
    }
}

/// The data defining the model torus built from linearizing charts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaData {
    pub p: i64,
    pub q: u32,
    pub alphas: Vec<f64>,
    pub multipliers: Vec<f64>,
    pub r_tilde: Vec<C64>,
    pub s_tilde: Vec<C64>,
    pub sigma: C64,
    /// `pi / |log rho_j|`.
    pub moduli: Vec<f64>,
    pub marker_points: Vec<f64>,
}

/// `sigma = sum_j s~_j - r~_j` for a hyperbolic map with `rot = p/q`.
pub fn sigma<L: Lift + ?Sized>(map: &L, p: i64, q: u32) -> Result<SigmaData> {
    let sys = ChartSystem::new(map, p, q)?;
    sigma_from(map, &sys)
}

pub fn sigma_from<L: Lift + ?Sized>(map: &L, sys: &ChartSystem) -> Result<SigmaData> {
    let k = sys.len() as isize;
    let mut r_tilde = Vec::with_capacity(sys.len());
    let mut s_tilde = Vec::with_capacity(sys.len());
    let mut moduli = Vec::with_capacity(sys.len());
    for j in 0..k {
        let chart = sys.chart(j);
        let log_rho = chart.rho.ln();
        let r = chart.inverse(map, sys.marker(j))?.value;
        let s = chart.inverse(map, sys.marker(j - 1))?.value;
        let modulus = PI / log_rho.abs();
        r_tilde.push(C64::new(r.ln() / log_rho, 0.0));
        s_tilde.push(C64::new(s.abs().ln() / log_rho, modulus));
        moduli.push(modulus);
    }
    let sigma = s_tilde.iter().zip(&r_tilde).map(|(s, r)| s - r).sum();
    Ok(SigmaData {
        p: sys.p,
        q: sys.q,
        alphas: sys.alphas.clone(),
        multipliers: sys.charts.iter().map(|c| c.rho).collect(),
        r_tilde,
        s_tilde,
        sigma,
        moduli,
        marker_points: sys.markers.clone(),
    })
}

/// `R = 1 / (2 pi q sum_x 1/|log rho_x|)`, the sum running over all
/// periodic points (each orbit counts `q` times).
pub fn bubble_disk_radius(cycles: &[Cycle], q: u32) -> Result<f64> {
    if cycles.is_empty() || q == 0 {
        return Err(Error::InvalidParameter("need at least one cycle and q >= 1".into()));
    }
    let mut sum = 0.0;
    for c in cycles {
        if c.kind == CycleKind::Parabolic {
            return Err(Error::ParabolicPresent { multiplier: c.multiplier });
        }
        sum += c.points.len() as f64 / c.multiplier.ln().abs();
    }
    Ok(1.0 / (2.0 * PI * q as f64 * sum))
}

/// The coarse radius `D_f / (4 pi q^2)`.
pub fn coarse_disk_radius<L: Lift + ?Sized>(map: &L, q: u32) -> Result<f64> {
    let d = total_distortion(map)?.value;
    Ok(d / (4.0 * PI * (q as f64).powi(2)))
}

/// Both radii for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskRadii {
    pub radius: f64,
    pub coarse: f64,
}

pub fn disk_radii<L: Lift + ?Sized>(map: &L, cycles: &[Cycle], q: u32) -> Result<DiskRadii> {
    Ok(DiskRadii { radius: bubble_disk_radius(cycles, q)?, coarse: coarse_disk_radius(map, q)? })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnuliCheck {
    pub pass: bool,
    /// `Im tau / |a + b tau|^2 - sum of moduli`.
    pub slack: f64,
    /// Uncertainty of the slack propagated from the error of `tau`.
    pub tolerance: f64,
}

/// Length-area inequality `Im tau / |a + b tau|^2 >= sum mod A_j`,
/// evaluated at the representative of `tau` minimizing `|a + b tau|`.
/// `tau_error` is the absolute uncertainty of `tau`; the check passes when
/// the slack is above minus its propagated effect.
pub fn annuli_inequality_check(
    tau: UpperHalfPoint,
    tau_error: f64,
    moduli: &[f64],
    homology: (i64, i64),
) -> Result<AnnuliCheck> {
    let (a, b) = homology;
    if gcd(a, b) != 1 {
        return Err(Error::NonCoprimeHomology { a, b });
    }
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { re: tau.re, im: tau.im });
    }
    let t = if b == 0 {
        tau.value()
    } else {
        let n = (-(a as f64 + b as f64 * tau.re) / b as f64).round();
        tau.value() + n
    };
    let d = C64::new(a as f64, 0.0) + t * b as f64;
    let lhs = t.im / d.norm_sqr();
    let slack = lhs - moduli.iter().sum::<f64>();
    let tolerance = tau_error * (1.0 / d.norm_sqr() + 2.0 * t.im * (b as f64).abs() / d.norm().powi(3));
    Ok(AnnuliCheck { pass: slack >= -tolerance, slack, tolerance })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcReport {
    /// `d_{H/Z}(q tau_bar, -1/sigma)`.
    pub distance: f64,
    /// `5 D_f` of the map itself.
    pub bound_f: f64,
    /// `5 D_f` of `f^q`, the bound used for `passes`.
    pub bound_fq: f64,
    pub sigma: C64,
    pub passes: bool,
}

/// Slack allowed on top of `5 D_{f^q}`.
pub const QC_TOLERANCE: f64 = 0.1;

/// Compares the modulus of the glued torus with the chart model `-1/sigma`.
pub fn qc_estimate_check<L: Lift + ?Sized>(map: &L, p: i64, q: u32, tau_bar: UpperHalfPoint) -> Result<QcReport> {
    let data = sigma(map, p, q)?;
    let model = -data.sigma.inv();
    let distance = quotient_distance(tau_bar.value() * q as f64, model)?;
    let bound_f = 5.0 * total_distortion(map)?.value;
    let bound_fq = 5.0 * total_distortion(&iterate(map, q)?)?.value;
    Ok(QcReport { distance, bound_f, bound_fq, sigma: data.sigma, passes: distance <= bound_fq + QC_TOLERANCE })
}

/// Distortion `max log xi' - min log xi'` of the gluing map `xi_j` over
/// one fundamental interval `[x_j, g(x_j)]`.
pub fn xi_distortion<L: Lift + ?Sized>(map: &L, p: i64, q: u32, j: usize) -> Result<f64> {
    let sys = ChartSystem::new(map, p, q)?;
    xi_distortion_from(map, &sys, j)
}

pub fn xi_distortion_from<L: Lift + ?Sized>(map: &L, sys: &ChartSystem, j: usize) -> Result<f64> {
    if j >= sys.len() {
        return Err(Error::InvalidParameter(format!("index {j} out of range 0..{}", sys.len())));
    }
    let j = j as isize;
    let (cj, cn) = (sys.chart(j), sys.chart(j + 1));
    let x0 = sys.marker(j);
    let g = Iterate { base: map, q: sys.q };
    let x1 = g.value(x0) - sys.p as f64;
    let (lj, ln) = (cj.rho.ln(), cn.rho.ln());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=XI_GRID {
        let x = x0 + (x1 - x0) * i as f64 / XI_GRID as f64;
        let t = cj.inverse(map, x)?;
        let s = cn.inverse(map, x)?;
        let dt = t.derivative / (t.value * lj);
        let ds = s.derivative / (s.value * ln);
        let v = (ds / dt).ln();
        lo = lo.min(v);
        hi = hi.max(v);
    }
    Ok(hi - lo)
}
