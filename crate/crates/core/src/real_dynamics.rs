//! Rotation numbers, periodic cycles and their multipliers, rational
//! plateaus of shifted families, and Denjoy distortion.
//!
//! Comparisons `rot(f) <=> p/q` are decided by the sign of
//! `G(x) = F^q(x) - x - p`: it has a zero iff `rot(f) = p/q`, and is
//! positive everywhere iff `rot(f) > p/q`. The rotation number is located
//! by a Stern-Brocot descent driven by these comparisons, which visits the
//! best rational approximants and gallops through long partial quotients.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::circle_map::{iterate, Lift, Shifted};
use crate::error::{Error, Result};
use crate::quadrature::bisect;

/// `|rho - 1|` below this counts as parabolic.
pub const TOL_PAR: f64 = 1e-8;
/// A tangential zero of `G` is accepted when `|G|` at the touching
/// extremum is below this.
pub const TANGENCY_TOL: f64 = 1e-10;
/// Resolution of the sign-change scan in [`find_cycles`].
pub const ROOT_SCAN: usize = 1 << 14;
/// Largest denominator tried by the rotation-number descent.
pub const MAX_DENOMINATOR: i64 = 10_000_000;

/// Denominators up to this get a full grid test for `G` having a zero.
const GRID_TEST_MAX_Q: i64 = 2000;
const GRID_TEST_POINTS: usize = 256;
const PLATEAU_GRID: usize = 2048;

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleKind {
    Attracting,
    Repelling,
    Parabolic,
}

impl CycleKind {
    pub fn classify(multiplier: f64) -> Self {
        if multiplier < 1.0 - TOL_PAR {
            CycleKind::Attracting
        } else if multiplier > 1.0 + TOL_PAR {
            CycleKind::Repelling
        } else {
            CycleKind::Parabolic
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CycleKind::Attracting => "attracting",
            CycleKind::Repelling => "repelling",
            CycleKind::Parabolic => "parabolic",
        }
    }
}

/// One periodic orbit of combinatorial rotation `winding / period`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    /// Orbit points in `[0, 1)`, sorted.
    pub points: Vec<f64>,
    pub period: u32,
    pub winding: i64,
    pub multiplier: f64,
    pub kind: CycleKind,
}

impl Cycle {
    pub fn log_multiplier(&self) -> f64 {
        self.multiplier.ln()
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kind != CycleKind::Parabolic
    }
}

/// Tag for a plateau endpoint; filled in by the bubble tracer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointKind {
    Real,
    Complex,
    None,
}

impl EndpointKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EndpointKind::Real => "real",
            EndpointKind::Complex => "complex",
            EndpointKind::None => "none",
        }
    }
}

/// The closed set of `omega` with `rot(f + omega) = p/q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub p: i64,
    pub q: u32,
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub lo_kind: EndpointKind,
    pub hi_kind: EndpointKind,
}

impl Plateau {
    pub fn width(&self) -> f64 {
        self.omega_hi - self.omega_lo
    }

    /// True when the plateau is a single point at the working resolution.
    pub fn is_degenerate(&self) -> bool {
        self.width() <= PLATEAU_RESOLUTION
    }
}

/// Bisection resolution for plateau edges.
pub const PLATEAU_RESOLUTION: f64 = 1e-10;

/// Result of locating a rotation number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rotation {
    /// `F^q(x) = x + p` has a solution.
    Rational { p: i64, q: u32 },
    /// The lifted rotation number lies in `[lo, hi]`.
    Bracket { lo: f64, hi: f64 },
}

impl Rotation {
    /// The lifted rotation number (midpoint of the bracket if irrational).
    pub fn lifted(&self) -> f64 {
        match *self {
            Rotation::Rational { p, q } => p as f64 / q as f64,
            Rotation::Bracket { lo, hi } => 0.5 * (lo + hi),
        }
    }

    /// The rotation number in `[0, 1)`.
    pub fn value(&self) -> f64 {
        let v = self.lifted().rem_euclid(1.0);
        if v >= 1.0 {
            0.0
        } else {
            v
        }
    }
}

/// Minimum and maximum of `g` over `[0, 1)`: a grid pass followed by
/// golden-section refinement around the best few grid extrema.
pub(crate) fn extrema<G: Fn(f64) -> f64>(g: &G, n: usize) -> ((f64, f64), (f64, f64)) {
    let h = 1.0 / n as f64;
    let vals: Vec<f64> = (0..n).map(|i| g(i as f64 * h)).collect();
    let pick = |sign: f64| -> (f64, f64) {
        let mut cands: Vec<usize> = (0..n)
            .filter(|&i| {
                let v = sign * vals[i];
                v >= sign * vals[(i + n - 1) % n] && v >= sign * vals[(i + 1) % n]
            })
            .collect();
        cands.sort_by(|&i, &j| (sign * vals[j]).total_cmp(&(sign * vals[i])));
        cands.truncate(3);
        let mut best = (0.0, f64::NEG_INFINITY);
        for i in cands {
            let (x, v) = golden_max(&|x| sign * g(x), i as f64 * h - h, i as f64 * h + h);
            if v > best.1 {
                best = (x, v);
            }
        }
        (best.0.rem_euclid(1.0), sign * best.1)
    };
    (pick(-1.0), pick(1.0))
}

pub(crate) fn golden_max<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if b - a < 1e-13 {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Range of `G = F^q - id - p`, on a refined grid for small `q` and at
/// `x = 0` otherwise.
fn g_range<L: Lift + ?Sized>(map: &L, p: i64, q: i64, grid: usize) -> (f64, f64) {
    let it = crate::circle_map::Iterate { base: map, q: q as u32 };
    let g = |x: f64| it.value(x) - x - p as f64;
    if grid <= 1 {
        let v = g(0.0);
        return (v, v);
    }
    let ((_, lo), (_, hi)) = extrema(&g, grid);
    (lo, hi)
}

struct Comparator<'a, L: ?Sized> {
    map: &'a L,
    evaluations: u64,
}

impl<L: Lift + ?Sized> Comparator<'_, L> {
    /// `rot(f)` compared with `p/q`; `Equal` means `G` has a zero.
    fn cmp(&mut self, p: i64, q: i64) -> Ordering {
        let grid = if q <= GRID_TEST_MAX_Q { GRID_TEST_POINTS } else { 1 };
        self.evaluations += (q as u64) * grid as u64;
        let (lo, hi) = g_range(self.map, p, q, grid);
        let eps = rounding_slack(q);
        if lo > eps {
            Ordering::Greater
        } else if hi < -eps {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }

    fn has_fixed_point(&mut self, p: i64, q: i64) -> bool {
        if q > MAX_DENOMINATOR {
            return false;
        }
        let grid = if q <= GRID_TEST_MAX_Q { 4096 } else { 1 };
        self.evaluations += q as u64 * grid as u64;
        let (lo, hi) = g_range(self.map, p, q, grid);
        let eps = rounding_slack(q);
        lo <= eps && hi >= -eps
    }
}

/// Values of `F^q - id - p` this small are rounding noise: a rigid
/// rotation by the double nearest `p/q` must count as `p/q`.
fn rounding_slack(q: i64) -> f64 {
    4.0 * f64::EPSILON * q as f64
}

/// Locates the rotation number of `map` to within `tol`, detecting exact
/// rational values.
pub fn rotation<L: Lift + ?Sized>(map: &L, tol: f64) -> Result<Rotation> {
    descend(map, tol, None)
}

/// Like [`rotation`], but stops as soon as the bracket excludes `target`,
/// which is all a comparison with `target` needs. Instead of failing at
/// the denominator cap it returns the open bracket reached there.
pub fn rotation_relative_to<L: Lift + ?Sized>(map: &L, target: f64, tol: f64) -> Result<Rotation> {
    descend(map, tol, Some(target))
}

fn descend<L: Lift + ?Sized>(map: &L, tol: f64, target: Option<f64>) -> Result<Rotation> {
    if !(tol >= 1e-12) {
        return Err(Error::InvalidParameter(format!("rotation tolerance {tol} is below 1e-12")));
    }
    let mut cmp = Comparator { map, evaluations: 0 };
    // |rot - d(0)| < 1 because d has oscillation below 1.
    let n = map.value(0.0).floor() as i64;
    let (mut a, mut b, mut c, mut d) = match cmp.cmp(n, 1) {
        Ordering::Equal => return Ok(Rotation::Rational { p: n, q: 1 }),
        Ordering::Less => (n - 1, 1, n, 1),
        Ordering::Greater => match cmp.cmp(n + 1, 1) {
            Ordering::Equal => return Ok(Rotation::Rational { p: n + 1, q: 1 }),
            Ordering::Less => (n, 1, n + 1, 1),
            Ordering::Greater => (n + 1, 1, n + 2, 1),
        },
    };
    loop {
        let width = 1.0 / (b as f64 * d as f64);
        // rot lies strictly inside (a/b, c/d), so a target at an endpoint is
        // already ordered
        let excluded = target.is_some_and(|t| t * (b as f64) <= a as f64 || t * (d as f64) >= c as f64);
        if width <= tol || excluded {
            return Ok(Rotation::Bracket { lo: a as f64 / b as f64, hi: c as f64 / d as f64 });
        }
        if b + d > MAX_DENOMINATOR {
            // a partial quotient ran past the cap: either an endpoint is
            // the exact value or the tolerance is out of reach
            for (p, q) in [(a, b), (c, d)] {
                if cmp.has_fixed_point(p, q) {
                    return Ok(Rotation::Rational { p, q: q as u32 });
                }
            }
            if target.is_some() {
                // the open bracket still orders every target outside it
                return Ok(Rotation::Bracket { lo: a as f64 / b as f64, hi: c as f64 / d as f64 });
            }
            return Err(Error::NoConvergence {
                lo: a as f64 / b as f64,
                hi: c as f64 / d as f64,
                iterations: cmp.evaluations,
            });
        }
        match cmp.cmp(a + c, b + d) {
            Ordering::Equal => return Ok(Rotation::Rational { p: a + c, q: (b + d) as u32 }),
            Ordering::Greater => {
                // rot >= (a + k c)/(b + k d) for k = 1; find the last such k
                match gallop(&mut cmp, (a, b), (c, d), Ordering::Greater, tol) {
                    Gallop::Exact(p, q) => return Ok(Rotation::Rational { p, q: q as u32 }),
                    Gallop::Steps(k, bounded) => {
                        let lo = (a + k * c, b + k * d);
                        if bounded {
                            (c, d) = (lo.0 + c, lo.1 + d);
                        }
                        (a, b) = lo;
                    }
                }
            }
            Ordering::Less => match gallop(&mut cmp, (c, d), (a, b), Ordering::Less, tol) {
                Gallop::Exact(p, q) => return Ok(Rotation::Rational { p, q: q as u32 }),
                Gallop::Steps(k, bounded) => {
                    let hi = (c + k * a, d + k * b);
                    if bounded {
                        (a, b) = (hi.0 + a, hi.1 + b);
                    }
                    (c, d) = hi;
                }
            },
        }
    }
}

enum Gallop {
    Exact(i64, i64),
    /// Largest `k` on the `dir` side, and whether `k + 1` was seen on the
    /// other side (false when the denominator cap stopped the search).
    Steps(i64, bool),
}

/// With `base + 1 * step` known to lie on side `dir` of the rotation
/// number, finds the largest `k` such that `base + k * step` still does.
fn gallop<L: Lift + ?Sized>(
    cmp: &mut Comparator<'_, L>,
    base: (i64, i64),
    step: (i64, i64),
    dir: Ordering,
    tol: f64,
) -> Gallop {
    // past this k the bracket is narrower than tol anyway
    let k_tol = ((1.0 / (tol * step.1 as f64) - base.1 as f64) / step.1 as f64).ceil().clamp(1.0, 1e15) as i64 + 1;
    let kmax = ((MAX_DENOMINATOR - base.1) / step.1).min(k_tol).max(1);
    let mut probe = |k: i64| cmp.cmp(base.0 + k * step.0, base.1 + k * step.1);
    let mut good = 1;
    let mut bad = None;
    let mut k = 2;
    while k <= kmax {
        match probe(k) {
            Ordering::Equal => return Gallop::Exact(base.0 + k * step.0, base.1 + k * step.1),
            o if o == dir => {
                good = k;
                k *= 2;
            }
            _ => {
                bad = Some(k);
                break;
            }
        }
    }
    let Some(mut bad) = bad else {
        if good < kmax {
            match probe(kmax) {
                Ordering::Equal => {
                    return Gallop::Exact(base.0 + kmax * step.0, base.1 + kmax * step.1)
                }
                o if o == dir => return Gallop::Steps(kmax, false),
                _ => return bisect_steps(&mut probe, good, kmax, dir, base, step),
            }
        }
        return Gallop::Steps(good, false);
    };
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        match probe(mid) {
            Ordering::Equal => return Gallop::Exact(base.0 + mid * step.0, base.1 + mid * step.1),
            o if o == dir => good = mid,
            _ => bad = mid,
        }
    }
    Gallop::Steps(good, true)
}

fn bisect_steps<P: FnMut(i64) -> Ordering>(
    probe: &mut P,
    mut good: i64,
    mut bad: i64,
    dir: Ordering,
    base: (i64, i64),
    step: (i64, i64),
) -> Gallop {
    while bad - good > 1 {
        let mid = good + (bad - good) / 2;
        match probe(mid) {
            Ordering::Equal => return Gallop::Exact(base.0 + mid * step.0, base.1 + mid * step.1),
            o if o == dir => good = mid,
            _ => bad = mid,
        }
    }
    Gallop::Steps(good, true)
}

/// The lifted rotation number `lim F^n(x)/n`, to within `tol`.
pub fn lifted_rotation_number<L: Lift + ?Sized>(map: &L, tol: f64) -> Result<f64> {
    Ok(rotation(map, tol)?.lifted())
}

/// `rot(f)` in `[0, 1)`, to within `tol`.
pub fn rotation_number<L: Lift + ?Sized>(map: &L, tol: f64) -> Result<f64> {
    Ok(rotation(map, tol)?.value())
}

/// All periodic orbits of rotation `p/q`.
pub fn find_cycles<L: Lift + ?Sized>(map: &L, p: i64, q: u32) -> Result<Vec<Cycle>> {
    if q == 0 || gcd(p, q as i64) != 1 {
        return Err(Error::InvalidParameter(format!("{p}/{q} is not a reduced fraction")));
    }
    let it = iterate(map, q)?;
    let pf = p as f64;
    let g = |x: f64| it.value(x) - x - pf;
    let n = ROOT_SCAN;
    let h = 1.0 / n as f64;
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let gv: Vec<f64> = xs.iter().map(|&x| g(x)).collect();

    if gv.iter().all(|v| v.abs() <= 1e-12) {
        return Err(Error::RootFindingIncomplete { suspects: vec![(0.0, 1.0)] });
    }
    let flat = flat_runs(&gv, &xs);
    if !flat.is_empty() {
        return Err(Error::RootFindingIncomplete { suspects: flat });
    }

    let polish = |lo: f64, hi: f64| -> f64 {
        let mut x = bisect(&g, lo, hi, 1e-14);
        for _ in 0..3 {
            let j = it.jet(x);
            let step = (j.value - x - pf) / (j.d1 - 1.0);
            let y = x - step;
            if !(y > lo && y < hi) || !step.is_finite() {
                break;
            }
            x = y;
        }
        x
    };

    let mut roots: Vec<f64> = Vec::new();
    let mut tangent: Vec<f64> = Vec::new();
    for i in 0..n {
        let (a, b) = (gv[i], gv[i + 1]);
        if a == 0.0 {
            roots.push(xs[i]);
        } else if (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) {
            roots.push(polish(xs[i], xs[i + 1]));
        }
    }
    // Tangencies and root pairs closer than the scan spacing show up as
    // extrema of G without a sign change.
    for i in 0..n {
        let prev = gv[(i + n - 1) % n];
        let (cur, next) = (gv[i], gv[i + 1]);
        if cur == 0.0 || prev.signum() != cur.signum() || next.signum() != cur.signum() {
            continue;
        }
        if cur.abs() > prev.abs() || cur.abs() > next.abs() {
            continue;
        }
        let sign = -cur.signum();
        let (x_star, v) = golden_max(&|x| sign * g(x), xs[i] - h, xs[i] + h);
        let v = sign * v;
        if v.signum() != cur.signum() && v != 0.0 {
            roots.push(polish(xs[i] - h, x_star));
            roots.push(polish(x_star, xs[i] + h));
        } else if v.abs() < TANGENCY_TOL {
            roots.push(x_star);
            tangent.push(x_star.rem_euclid(1.0));
        }
    }
    if roots.is_empty() {
        return Err(Error::WrongRotationNumber { p, q });
    }

    let mut roots: Vec<f64> = roots.into_iter().map(|r| r.rem_euclid(1.0) % 1.0).collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    if roots.len() > 1 && roots[0] + 1.0 - roots[roots.len() - 1] < 1e-9 {
        roots.pop();
    }

    // A double root within the tangency tolerance is parabolic whatever
    // multiplier the located point happens to give.
    let mut cycles = group_orbits(map, &roots, p, q)?;
    for c in &mut cycles {
        if c.points.iter().any(|&x| tangent.iter().any(|&t| circular_gap(x, t) < 1e-9)) {
            c.kind = CycleKind::Parabolic;
        }
    }
    Ok(cycles)
}

/// Runs of consecutive grid values with `|G| <= 1e-12`: intervals where
/// roots cannot be separated.
fn flat_runs(gv: &[f64], xs: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut start = None;
    for i in 0..gv.len() {
        let flat = gv[i].abs() <= 1e-12;
        match (flat, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                if i - s >= 3 {
                    out.push((xs[s], xs[i - 1]));
                }
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        if gv.len() - s >= 3 {
            out.push((xs[s], xs[gv.len() - 1]));
        }
    }
    out
}

fn circular_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn group_orbits<L: Lift + ?Sized>(map: &L, roots: &[f64], p: i64, q: u32) -> Result<Vec<Cycle>> {
    let mut assigned = vec![false; roots.len()];
    let mut cycles = Vec::new();
    for start in 0..roots.len() {
        if assigned[start] {
            continue;
        }
        let mut members = vec![start];
        let mut y = roots[start];
        let mut rho = 1.0;
        for step in 0..q {
            let j = map.jet(y);
            rho *= j.d1;
            y = j.value;
            if step + 1 == q {
                break;
            }
            let (idx, gap) = roots
                .iter()
                .enumerate()
                .map(|(i, &r)| (i, circular_gap(r, y)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("roots is nonempty");
            if gap > 1e-6 || assigned[idx] || members.contains(&idx) {
                let yy = y.rem_euclid(1.0);
                return Err(Error::RootFindingIncomplete { suspects: vec![(yy - 1e-6, yy + 1e-6)] });
            }
            members.push(idx);
        }
        for &m in &members {
            assigned[m] = true;
        }
        let mut points: Vec<f64> = members.iter().map(|&m| roots[m]).collect();
        points.sort_by(f64::total_cmp);
        cycles.push(Cycle { points, period: q, winding: p, multiplier: rho, kind: CycleKind::classify(rho) });
    }
    Ok(cycles)
}

/// Orbit types in circular order of their points, starting from the
/// smallest point.
pub fn kinds_in_circular_order(cycles: &[Cycle]) -> Vec<CycleKind> {
    let mut tagged: Vec<(f64, CycleKind)> =
        cycles.iter().flat_map(|c| c.points.iter().map(move |&x| (x, c.kind))).collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    tagged.into_iter().map(|t| t.1).collect()
}

/// `(min G, max G)` for the shifted map `f + omega` and `G = F^q - id - p`.
pub(crate) fn shifted_g_range<L: Lift + ?Sized>(family: &L, omega: f64, p: i64, q: u32) -> (f64, f64) {
    let shifted = Shifted { base: family, omega };
    g_range(&shifted, p, q as i64, PLATEAU_GRID)
}

/// The `omega`-interval on which `rot(f + omega) = p/q`, inside `bracket`.
///
/// A plateau that pinches to a point (rotation families) is returned with
/// `omega_lo == omega_hi`.
pub fn plateau<L: Lift + ?Sized>(family: &L, p: i64, q: u32, bracket: (f64, f64)) -> Result<Plateau> {
    if q == 0 || gcd(p, q as i64) != 1 {
        return Err(Error::InvalidParameter(format!("{p}/{q} is not a reduced fraction")));
    }
    let (lo, hi) = bracket;
    if !(lo < hi) {
        return Err(Error::InvalidParameter("plateau bracket must have lo < hi".into()));
    }
    let below = |w: f64| shifted_g_range(family, w, p, q).1 < 0.0;
    let above = |w: f64| shifted_g_range(family, w, p, q).0 > 0.0;
    if !below(lo) || !above(hi) {
        return Err(Error::InvalidParameter(format!(
            "rot(f + omega) - {p}/{q} does not change sign over [{lo}, {hi}]"
        )));
    }
    let omega_lo = bisect_predicate(&below, lo, hi);
    let omega_hi = bisect_predicate(&|w| !above(w), omega_lo.min(hi), hi);
    let (omega_lo, omega_hi) = if omega_hi - omega_lo <= PLATEAU_RESOLUTION {
        let m = 0.5 * (omega_lo + omega_hi);
        (m, m)
    } else {
        (omega_lo, omega_hi)
    };
    Ok(Plateau { p, q, omega_lo, omega_hi, lo_kind: EndpointKind::None, hi_kind: EndpointKind::None })
}

/// Boundary of a monotone predicate, true at `lo` and false at `hi`.
fn bisect_predicate<P: Fn(f64) -> bool>(pred: &P, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 0.25 * PLATEAU_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Largest `log((F^n)'(x) / (F^n)'(y))` over a grid of `(a, b)`, given
/// that `I, f(I), ..., f^{n-1}(I)` are pairwise disjoint on the circle.
pub fn denjoy_distortion<L: Lift + ?Sized>(map: &L, interval: (f64, f64), n: u32) -> Result<f64> {
    let (a, b) = interval;
    if !(a < b) || b - a >= 1.0 || n == 0 {
        return Err(Error::InvalidParameter("need a < b < a + 1 and n >= 1".into()));
    }
    let mut arcs = Vec::with_capacity(n as usize);
    let (mut lo, mut hi) = (a, b);
    for _ in 0..n {
        arcs.push((lo.rem_euclid(1.0), hi - lo));
        lo = map.value(lo);
        hi = map.value(hi);
    }
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            let (s1, l1) = arcs[i];
            let (s2, l2) = arcs[j];
            if (s2 - s1).rem_euclid(1.0) < l1 || (s1 - s2).rem_euclid(1.0) < l2 {
                return Err(Error::ImagesOverlap { first: i, second: j });
            }
        }
    }
    let it = iterate(map, n)?;
    let grid = 1024;
    let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..=grid {
        let x = a + (b - a) * i as f64 / grid as f64;
        let l = it.slope(x).ln();
        min = min.min(l);
        max = max.max(l);
    }
    Ok(max - min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::{total_distortion, CircleMap};
    use std::f64::consts::PI;

    fn arnold(w: f64) -> CircleMap {
        CircleMap::arnold(w, 1.0 / (4.0 * PI)).unwrap()
    }

    #[test]
    fn rotation_numbers_of_rotations() {
        assert_eq!(rotation(&CircleMap::rotation(0.25), 1e-12).unwrap(), Rotation::Rational { p: 1, q: 4 });
        assert!((rotation_number(&CircleMap::rotation(0.25), 1e-12).unwrap() - 0.25).abs() < 1e-15);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let r = rotation_number(&CircleMap::rotation(g), 1e-12).unwrap();
        assert!((r - g).abs() <= 1e-12);
        let r = rotation_number(&CircleMap::rotation(-0.3), 1e-10).unwrap();
        assert!((r - 0.7).abs() <= 1e-10);
    }

    #[test]
    fn arnold_rotation_numbers() {
        assert_eq!(rotation(&arnold(0.0), 1e-12).unwrap(), Rotation::Rational { p: 0, q: 1 });
        let r = rotation_number(&arnold(0.2), 1e-10).unwrap();
        assert!(r > 0.0 && r < 0.5);
        let r2 = rotation_number(&arnold(0.25), 1e-10).unwrap();
        assert!(r2 >= r);
    }

    #[test]
    fn tolerance_floor() {
        assert!(rotation_number(&arnold(0.0), 1e-13).is_err());
    }

    #[test]
    fn arnold_fixed_points() {
        let cycles = find_cycles(&arnold(0.0), 0, 1).unwrap();
        assert_eq!(cycles.len(), 2);
        let rep = cycles.iter().find(|c| c.kind == CycleKind::Repelling).unwrap();
        let att = cycles.iter().find(|c| c.kind == CycleKind::Attracting).unwrap();
        assert!(circular_gap(rep.points[0], 0.0) < 1e-13);
        assert!((att.points[0] - 0.5).abs() < 1e-13);
        assert!((rep.multiplier - 1.5).abs() < 1e-12);
        assert!((att.multiplier - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_is_degenerate() {
        let e = find_cycles(&CircleMap::rotation(0.0), 0, 1).unwrap_err();
        assert_eq!(e.name(), "RootFindingIncomplete");
    }

    #[test]
    fn period_two_orbits() {
        let f = CircleMap::new(0.5, vec![0.0, 0.0], vec![0.0, 0.05]).unwrap();
        let cycles = find_cycles(&f, 1, 2).unwrap();
        assert_eq!(cycles.len(), 2);
        let kinds: Vec<_> = cycles.iter().map(|c| c.kind).collect();
        assert!(kinds.contains(&CycleKind::Attracting) && kinds.contains(&CycleKind::Repelling));
        for c in &cycles {
            assert_eq!(c.points.len(), 2);
        }
        let order = kinds_in_circular_order(&cycles);
        for w in order.windows(2) {
            assert_ne!(w[0], w[1]);
        }
    }

    #[test]
    fn wrong_rotation_number() {
        let e = find_cycles(&arnold(0.3), 0, 1).unwrap_err();
        assert_eq!(e.name(), "WrongRotationNumber");
    }

    #[test]
    fn parabolic_fixed_point_is_found() {
        let edge = 1.0 / (4.0 * PI);
        let cycles = find_cycles(&arnold(edge), 0, 1).unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].kind, CycleKind::Parabolic);
        assert!((cycles[0].points[0] - 0.75).abs() < 1e-5);
    }

    #[test]
    fn arnold_plateau() {
        let pl = plateau(&arnold(0.0), 0, 1, (-0.3, 0.3)).unwrap();
        let e = 1.0 / (4.0 * PI);
        assert!((pl.omega_lo + e).abs() < 1e-10 && (pl.omega_hi - e).abs() < 1e-10, "{pl:?}");
        let half = plateau(&arnold(0.0), 1, 2, (0.3, 0.7)).unwrap();
        assert!(half.omega_lo < 0.5 && half.omega_hi > 0.5 && half.width() > 1e-4);
    }

    #[test]
    fn rotation_family_plateau_is_a_point() {
        let pl = plateau(&CircleMap::rotation(0.0), 0, 1, (-0.2, 0.2)).unwrap();
        assert!(pl.is_degenerate());
        assert!(pl.omega_lo.abs() < 1e-10);
    }

    #[test]
    fn bad_bracket() {
        assert!(plateau(&arnold(0.0), 0, 1, (0.1, 0.3)).is_err());
    }

    #[test]
    fn denjoy_examples() {
        let r = denjoy_distortion(&CircleMap::rotation(0.3), (0.1, 0.15), 5).unwrap();
        assert_eq!(r, 0.0);
        let f = arnold(0.0);
        let v = denjoy_distortion(&f, (0.1, 0.2), 1).unwrap();
        assert!(v > 0.0 && v <= total_distortion(&f).unwrap().value);
        let e = denjoy_distortion(&CircleMap::rotation(0.3), (0.0, 0.2), 5).unwrap_err();
        assert_eq!(e.name(), "ImagesOverlap");
    }

    #[test]
    fn gcd_values() {
        assert_eq!(gcd(12, -18), 6);
        assert_eq!(gcd(0, 5), 5);
    }
}
