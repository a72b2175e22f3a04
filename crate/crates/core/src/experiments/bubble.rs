//! Boundary values of `tau` over a rational plateau, split into its
//! hyperbolic components, with endpoint classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle_map::{Lift, Shifted};
use crate::error::{Error, Result};
use crate::linearizer::bubble_disk_radius;
use crate::real_dynamics::{find_cycles, gcd, plateau, Cycle, CycleKind, EndpointKind, Plateau};
use crate::uniformizer::{boundary_tau_with, geometric_ladder, SolverOptions, Y_MIN};

/// A multiplier within this distance of 1 at the edge marks a real endpoint.
pub const REAL_ENDPOINT_TOL: f64 = 1e-6;
/// Multipliers staying this far from 1 mark a complex endpoint.
pub const COMPLEX_ENDPOINT_FLOOR: f64 = 1e-3;
/// Closest approach to an edge when collecting multiplier evidence.
const EDGE_DELTA_MIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Chebyshev samples per hyperbolic component.
    pub samples: usize,
    /// Ladder rungs per sample.
    pub rungs: usize,
    /// Largest ladder height.
    pub y_cap: f64,
    /// The first rung is `min(y_cap, edge_factor * distance to the edge)`.
    pub edge_factor: f64,
    /// Scan points used to split a plateau into hyperbolic components.
    pub component_scan: usize,
    pub solver: SolverOptions,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            samples: 16,
            rungs: 4,
            y_cap: 0.032,
            edge_factor: 4.0,
            component_scan: 128,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleSample {
    pub omega: f64,
    pub p: i64,
    pub q: u32,
    pub tau_re: f64,
    pub tau_im: f64,
    /// `|tau - p/q|^2 / Im tau` for the lift of `tau` nearest `p/q`.
    pub horocycle_height: f64,
    /// `arg(tau - p/q)` for the same lift.
    pub tangency_angle: f64,
    pub error_estimate: f64,
    /// Largest solver residual over the ladder; above the solver target the
    /// sample is not resolved and `error_estimate` is optimistic.
    pub max_residual: f64,
    /// Disk radius from the multipliers at `omega`, when all are hyperbolic.
    pub radius: Option<f64>,
}

impl BubbleSample {
    pub fn new(omega: f64, p: i64, q: u32, tau_re: f64, tau_im: f64, error_estimate: f64) -> Self {
        let (horocycle_height, tangency_angle) = horocycle(p, q, tau_re, tau_im);
        BubbleSample {
            omega,
            p,
            q,
            tau_re,
            tau_im,
            horocycle_height,
            tangency_angle,
            error_estimate,
            max_residual: 0.0,
            radius: None,
        }
    }
}

/// `(h, angle)` of `tau` relative to `p/q`.
pub fn horocycle(p: i64, q: u32, tau_re: f64, tau_im: f64) -> (f64, f64) {
    let c = p as f64 / q as f64;
    let x = tau_re - c - (tau_re - c).round();
    let h = if tau_im > 0.0 { (x * x + tau_im * tau_im) / tau_im } else { f64::INFINITY };
    (h, tau_im.atan2(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Multipliers of the hyperbolic cycles at `omega = edge -+ delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierTrace {
    pub delta: f64,
    pub omega: f64,
    pub multipliers: Vec<f64>,
}

impl MultiplierTrace {
    fn closest_to_one(&self) -> Option<f64> {
        self.multipliers.iter().map(|r| (r - 1.0).abs()).min_by(f64::total_cmp)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointReport {
    pub omega0: f64,
    pub side: Side,
    pub kind: EndpointKind,
    pub evidence: Vec<MultiplierTrace>,
}

/// One hyperbolic component of a plateau: the cycle structure is constant
/// on `(omega_lo, omega_hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentTrace {
    pub omega_lo: f64,
    pub omega_hi: f64,
    /// Number of periodic points inside the component.
    pub periodic_points: usize,
    pub samples: Vec<BubbleSample>,
    pub left: EndpointReport,
    pub right: EndpointReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleTrace {
    pub p: i64,
    pub q: u32,
    pub plateau: Plateau,
    pub components: Vec<ComponentTrace>,
}

impl BubbleTrace {
    pub fn samples(&self) -> impl Iterator<Item = &BubbleSample> {
        self.components.iter().flat_map(|c| c.samples.iter())
    }
}

/// An `omega` interval guaranteed to contain the `p/q` plateau strictly.
pub fn plateau_bracket<L: Lift + ?Sized>(family: &L, p: i64, q: u32) -> (f64, f64) {
    let n = 4096;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let x = i as f64 / n as f64;
        let d = family.value(x) - x;
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let c = p as f64 / q as f64;
    (c - hi - 1e-3, c - lo + 1e-3)
}

/// The plateau of `p/q` for `family + omega`; `EmptyPlateau` if it is a point.
pub fn nonempty_plateau<L: Lift + ?Sized>(family: &L, p: i64, q: u32) -> Result<Plateau> {
    if q == 0 || gcd(p, q as i64) != 1 {
        return Err(Error::InvalidParameter(format!("{p}/{q} is not a reduced fraction")));
    }
    let pl = plateau(family, p, q, plateau_bracket(family, p, q))?;
    if pl.is_degenerate() {
        return Err(Error::EmptyPlateau { p, q, pinch: pl.omega_lo });
    }
    Ok(pl)
}

fn cycles_at<L: Lift + ?Sized>(family: &L, omega: f64, p: i64, q: u32) -> Result<Vec<Cycle>> {
    find_cycles(&Shifted { base: family, omega }, p, q)
}

/// Number of hyperbolic periodic points, `None` when root finding fails.
fn hyperbolic_count<L: Lift + ?Sized>(family: &L, omega: f64, p: i64, q: u32) -> Option<usize> {
    let cycles = cycles_at(family, omega, p, q).ok()?;
    Some(cycles.iter().filter(|c| c.kind != CycleKind::Parabolic).map(|c| c.points.len()).sum())
}

/// Boundary between `inside` (where `pred` holds) and `outside`, to
/// floating-point resolution.
fn refine_edge<P: Fn(f64) -> bool>(pred: P, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if pred(mid) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

/// Splits a plateau into maximal intervals with a constant number of
/// hyperbolic periodic points. Components narrower than the scan spacing
/// are not resolved.
pub fn hyperbolic_components<L: Lift + ?Sized>(family: &L, pl: &Plateau, scan: usize) -> Vec<(f64, f64, usize)> {
    let (p, q) = (pl.p, pl.q);
    let scan = scan.max(2);
    let w = pl.width();
    let nodes: Vec<f64> = (0..scan).map(|i| pl.omega_lo + w * (i as f64 + 0.5) / scan as f64).collect();
    let counts: Vec<Option<usize>> = nodes.iter().map(|&o| hyperbolic_count(family, o, p, q)).collect();
    let outside_lo = pl.omega_lo - 1e-9;
    let outside_hi = pl.omega_hi + 1e-9;
    let mut out = Vec::new();
    let mut i = 0;
    while i < scan {
        let Some(c) = counts[i].filter(|&c| c > 0) else {
            i += 1;
            continue;
        };
        let mut j = i;
        while j + 1 < scan && counts[j + 1] == Some(c) {
            j += 1;
        }
        let pred = |o: f64| hyperbolic_count(family, o, p, q) == Some(c);
        let left_out = if i == 0 { outside_lo } else { nodes[i - 1] };
        let right_out = if j + 1 == scan { outside_hi } else { nodes[j + 1] };
        let lo = refine_edge(pred, nodes[i], left_out);
        let hi = refine_edge(pred, nodes[j], right_out);
        out.push((lo, hi, c));
        i = j + 1;
    }
    out
}

/// Classifies the edge `omega0` of a component from the multipliers seen
/// while approaching it from inside.
pub fn classify_endpoint<L: Lift + ?Sized>(
    family: &L,
    p: i64,
    q: u32,
    omega0: f64,
    side: Side,
    half_width: f64,
) -> EndpointReport {
    let inward = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let mut evidence = Vec::new();
    let mut delta = 0.25 * half_width;
    while delta >= EDGE_DELTA_MIN {
        let omega = omega0 + inward * delta;
        if let Ok(cycles) = cycles_at(family, omega, p, q) {
            let multipliers =
                cycles.iter().filter(|c| c.kind != CycleKind::Parabolic).map(|c| c.multiplier).collect();
            evidence.push(MultiplierTrace { delta, omega, multipliers });
        }
        delta *= 0.25;
    }
    let last = evidence.iter().rev().find_map(|t| t.closest_to_one());
    let kind = match last {
        Some(v) if v < REAL_ENDPOINT_TOL => EndpointKind::Real,
        Some(v) if v > COMPLEX_ENDPOINT_FLOOR => EndpointKind::Complex,
        _ => EndpointKind::None,
    };
    EndpointReport { omega0, side, kind, evidence }
}

/// Chebyshev points of `(lo, hi)` in increasing order.
pub fn chebyshev_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    (0..n).map(|i| mid - half * (std::f64::consts::PI * (i as f64 + 0.5) / n as f64).cos()).collect()
}

/// Ladder for a sample at distance `eps` from the nearest edge, kept above
/// the solver's minimum height.
pub fn edge_ladder(eps: f64, opts: &TraceOptions) -> Vec<f64> {
    let floor = Y_MIN * f64::powi(2.0, opts.rungs as i32 - 1);
    geometric_ladder(opts.y_cap.min(opts.edge_factor * eps).max(floor), opts.rungs)
}

/// One sample of the bubble at `omega` inside `(lo, hi)`.
pub fn bubble_sample<L: Lift + ?Sized>(
    family: &L,
    p: i64,
    q: u32,
    omega: f64,
    (lo, hi): (f64, f64),
    opts: &TraceOptions,
) -> Result<BubbleSample> {
    let eps = (omega - lo).min(hi - omega);
    let bv = boundary_tau_with(family, omega, &edge_ladder(eps, opts), &opts.solver)?;
    let mut s = BubbleSample::new(omega, p, q, bv.tau.re, bv.tau.im, bv.error_estimate);
    s.max_residual = bv.samples.iter().map(|r| r.residual).fold(0.0, f64::max);
    s.radius = cycles_at(family, omega, p, q).ok().and_then(|c| bubble_disk_radius(&c, q).ok());
    Ok(s)
}

/// Traces one component `(lo, hi)` of the `p/q` plateau.
pub fn trace_component<L: Lift + ?Sized>(
    family: &L,
    p: i64,
    q: u32,
    (lo, hi, count): (f64, f64, usize),
    opts: &TraceOptions,
) -> Result<ComponentTrace> {
    let samples = chebyshev_nodes(lo, hi, opts.samples)
        .into_par_iter()
        .map(|w| bubble_sample(family, p, q, w, (lo, hi), opts))
        .collect::<Result<Vec<_>>>()?;
    let half = 0.5 * (hi - lo);
    Ok(ComponentTrace {
        omega_lo: lo,
        omega_hi: hi,
        periodic_points: count,
        samples,
        left: classify_endpoint(family, p, q, lo, Side::Left, half),
        right: classify_endpoint(family, p, q, hi, Side::Right, half),
    })
}

/// Boundary values of `tau` over every hyperbolic component of the `p/q`
/// plateau of `family + omega`.
pub fn trace_bubble<L: Lift + ?Sized>(family: &L, p: i64, q: u32, opts: &TraceOptions) -> Result<BubbleTrace> {
    if opts.samples == 0 || opts.rungs < 2 {
        return Err(Error::InvalidParameter("need at least one sample and two rungs".into()));
    }
    let mut pl = nonempty_plateau(family, p, q)?;
    let comps = hyperbolic_components(family, &pl, opts.component_scan);
    if comps.is_empty() {
        return Err(Error::NotHyperbolic { reason: format!("no hyperbolic parameters on the {p}/{q} plateau") });
    }
    let components = comps.into_iter().map(|c| trace_component(family, p, q, c, opts)).collect::<Result<Vec<_>>>()?;
    let first = components.first().expect("nonempty");
    let last = components.last().expect("nonempty");
    if (first.omega_lo - pl.omega_lo).abs() < 1e-9 {
        pl.lo_kind = first.left.kind;
    }
    if (last.omega_hi - pl.omega_hi).abs() < 1e-9 {
        pl.hi_kind = last.right.kind;
    }
    Ok(BubbleTrace { p, q, plateau: pl, components })
}

/// `h <= 2 min(R, coarse) + tol` for a sample with a known radius.
pub fn disk_containment(sample: &BubbleSample, coarse: f64, tol: f64) -> bool {
    let r = sample.radius.map_or(coarse, |r| r.min(coarse));
    sample.horocycle_height <= 2.0 * r + tol
}
