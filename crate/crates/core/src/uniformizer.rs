//! Complex rotation numbers by spectral least squares.
//!
//! For `Im w > 0` the annulus between `R/Z` and `R/Z + w`, glued along its
//! boundaries by `f + w`, is a torus `C/(Z + tau Z)`. The uniformizing
//! coordinate is sought as
//!
//! `Phi(z) = z + sum_k a_k e^{2 pi i k z} + sum_k b_k e^{-2 pi i k (z - w)}`
//!
//! subject to `Phi(f(x_j) + w) = Phi(x_j) + tau` at `x_j = j/M`. Every basis
//! function has unit sup-norm on the closed annulus, which keeps the least
//! squares problem well conditioned even for thin annuli.

use std::f64::consts::TAU;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::circle_map::{Lift, C64};
use crate::error::{Error, Result};
use crate::hyperbolic::UpperHalfPoint;
use crate::quadrature::neville_at_zero;
use crate::spectral::{horner, Basis, Column, SpectralSystem};

pub use crate::spectral::CONDITION_LIMIT;
/// Smallest height `Im w` accepted by the solver.
pub const Y_MIN: f64 = 1e-5;

/// Solution of the gluing equation at one `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacySolution {
    pub omega: C64,
    pub tau: UpperHalfPoint,
    /// `tau` before reduction mod 1.
    pub tau_lift: C64,
    /// `a_1..a_N`, multiplying `e^{2 pi i k z}`.
    pub coeff_up: Vec<C64>,
    /// `b_1..b_N`, multiplying `e^{-2 pi i k (z - w)}`.
    pub coeff_down: Vec<C64>,
    /// Constant making `Phi(0) = 0`.
    pub phi_constant: C64,
    /// Largest defect of the gluing equation over the collocation points.
    pub residual: f64,
    /// Minimum of `Re Phi'` over `4M` points of both boundary circles.
    /// Positive values certify that `Phi` is injective on the annulus.
    pub min_phi_prime: f64,
    pub condition: f64,
    pub n: usize,
    pub m: usize,
}

impl ConjugacySolution {
    /// Flagged when the injectivity diagnostic fails.
    pub fn non_injective(&self) -> bool {
        !(self.min_phi_prime > 0.0)
    }

    /// `Phi(z)`, including the normalizing constant.
    pub fn phi(&self, z: C64) -> C64 {
        let up = (C64::new(0.0, TAU) * z).exp();
        let down = (C64::new(0.0, -TAU) * (z - self.omega)).exp();
        z + self.phi_constant + horner(&self.coeff_up, up) + horner(&self.coeff_down, down)
    }

    pub fn phi_prime(&self, z: C64) -> C64 {
        let up = (C64::new(0.0, TAU) * z).exp();
        let down = (C64::new(0.0, -TAU) * (z - self.omega)).exp();
        let mut acc = C64::new(1.0, 0.0);
        let (mut pu, mut pd) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        for (i, (a, b)) in self.coeff_up.iter().zip(&self.coeff_down).enumerate() {
            pu *= up;
            pd *= down;
            let k = C64::new(0.0, TAU * (i + 1) as f64);
            acc += k * (a * pu - b * pd);
        }
        acc
    }
}

/// Settings for adaptive solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Smallest frequency cutoff tried.
    pub n_min: usize,
    /// Largest frequency cutoff; solves stop here even above target.
    pub n_max: usize,
    /// Residual at which refinement stops.
    pub residual_target: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { n_min: 16, n_max: 512, residual_target: 1e-8 }
    }
}

/// Smallest collocation count allowed for cutoff `n`.
pub fn min_collocation(n: usize) -> usize {
    4 * n + 4
}

/// Solves the gluing equation for `f + w` with cutoff `n` and `m`
/// collocation points.
pub fn complex_rotation_number<L: Lift + ?Sized>(
    map: &L,
    omega: C64,
    n: usize,
    m: usize,
) -> Result<ConjugacySolution> {
    if !(omega.im > 0.0) || !omega.re.is_finite() || !omega.im.is_finite() {
        return Err(Error::NotInUpperHalfPlane { re: omega.re, im: omega.im });
    }
    if omega.im < Y_MIN {
        return Err(Error::HeightBelowMinimum { height: omega.im, minimum: Y_MIN });
    }
    if m < min_collocation(n) {
        return Err(Error::InvalidParameter(format!("M = {m} is below 4N+4 = {}", min_collocation(n))));
    }
    let mf = m as f64;
    let fx: Vec<f64> = (0..m).map(|j| map.value(j as f64 / mf)).collect();
    let rhs: Vec<C64> = (0..m).map(|j| C64::new(j as f64 / mf - fx[j], 0.0) - omega).collect();
    let w: Vec<C64> = (0..=n).map(|k| (C64::new(0.0, TAU * k as f64) * omega).exp()).collect();
    let system = SpectralSystem::new(&fx, rhs, n);
    let one = C64::new(1.0, 0.0);
    let mut cols: Vec<Column> = Vec::with_capacity(2 * n + 1);
    for k in 1..=n as i64 {
        cols.push(vec![(w[k as usize], Basis::P(k)), (-one, Basis::E(k))]);
    }
    for k in 1..=n as i64 {
        cols.push(vec![(one, Basis::P(-k)), (-w[k as usize], Basis::E(-k))]);
    }
    cols.push(vec![(-one, Basis::E(0))]);
    let (sol, condition) = system.solve(&cols)?;
    let residual = system.residual(&cols, &sol);

    let coeff_up = sol[..n].to_vec();
    let coeff_down = sol[n..2 * n].to_vec();
    let tau_lift = sol[2 * n];

    let min_phi_prime = min_re_phi_prime(&coeff_up, &coeff_down, &w, 4 * m);
    let phi_constant = -(coeff_up.iter().sum::<C64>()
        + coeff_down.iter().zip(&w[1..]).map(|(b, wk)| b * wk).sum::<C64>());

    Ok(ConjugacySolution {
        omega,
        tau: UpperHalfPoint::new(tau_lift)?,
        tau_lift,
        coeff_up,
        coeff_down,
        phi_constant,
        residual,
        min_phi_prime,
        condition,
        n,
        m,
    })
}

fn min_re_phi_prime(a: &[C64], b: &[C64], w: &[C64], len: usize) -> f64 {
    let inverse = FftPlanner::new().plan_fft_inverse(len);
    let mut worst = f64::INFINITY;
    for top in [false, true] {
        let mut c = vec![C64::new(0.0, 0.0); len];
        for k in 1..=a.len() {
            let ik = C64::new(0.0, TAU * k as f64);
            let (up, down) = if top { (a[k - 1] * w[k], b[k - 1]) } else { (a[k - 1], b[k - 1] * w[k]) };
            c[k % len] += ik * up;
            c[(len - k % len) % len] -= ik * down;
        }
        inverse.process(&mut c);
        for z in c {
            worst = worst.min(1.0 + z.re);
        }
    }
    worst
}

/// Frequency cutoff to start from at height `y`.
fn initial_cutoff(y: f64, opts: &SolverOptions) -> usize {
    let guess = (0.4 / y).ceil() as usize;
    guess.max(opts.n_min).next_power_of_two().min(opts.n_max).max(opts.n_min.min(opts.n_max))
}

/// Solves at `w`, doubling `N` (with `M = 4N + 4`) until the residual
/// target or the cap is reached.
pub fn solve_adaptive<L: Lift + ?Sized>(map: &L, omega: C64, opts: &SolverOptions) -> Result<ConjugacySolution> {
    if !(omega.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane { re: omega.re, im: omega.im });
    }
    let mut n = initial_cutoff(omega.im, opts);
    loop {
        let sol = complex_rotation_number(map, omega, n, min_collocation(n))?;
        if sol.residual <= opts.residual_target || n >= opts.n_max {
            return Ok(sol);
        }
        n = (2 * n).min(opts.n_max);
    }
}

/// One rung of an extrapolation ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderSample {
    pub y: f64,
    pub tau: C64,
    pub residual: f64,
    pub min_phi_prime: f64,
    pub n: usize,
    pub m: usize,
}

/// Extrapolated boundary value `lim_{y -> 0} tau(w + iy)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValue {
    pub omega: f64,
    pub tau: UpperHalfPoint,
    /// The extrapolant before reduction mod 1.
    pub tau_lift: C64,
    pub error_estimate: f64,
    pub samples: Vec<LadderSample>,
}

/// Geometric ladder `y1, y1/2, ...` with `rungs` entries.
pub fn geometric_ladder(y1: f64, rungs: usize) -> Vec<f64> {
    (0..rungs).map(|l| y1 / f64::powi(2.0, l as i32)).collect()
}

/// The default ladder `0.032, 0.016, 0.008, 0.004`.
pub fn default_ladder() -> Vec<f64> {
    geometric_ladder(0.032, 4)
}

fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 2 {
        return Err(Error::InvalidParameter("a ladder needs at least two heights".into()));
    }
    for pair in ladder.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::InvalidParameter("ladder heights must strictly decrease".into()));
        }
    }
    let last = ladder[ladder.len() - 1];
    if !(last > 0.0) {
        return Err(Error::InvalidParameter("ladder heights must be positive".into()));
    }
    if last < Y_MIN {
        return Err(Error::HeightBelowMinimum { height: last, minimum: Y_MIN });
    }
    Ok(())
}

/// `tau_bar(w)` with the default solver options.
pub fn boundary_tau<L: Lift + ?Sized>(map: &L, omega: f64, ladder: &[f64]) -> Result<BoundaryValue> {
    boundary_tau_with(map, omega, ladder, &SolverOptions::default())
}

/// Polynomial extrapolation to `y = 0` of `tau(w + i y_l)` over the ladder.
pub fn boundary_tau_with<L: Lift + ?Sized>(
    map: &L,
    omega: f64,
    ladder: &[f64],
    opts: &SolverOptions,
) -> Result<BoundaryValue> {
    validate_ladder(ladder)?;
    let mut samples = Vec::with_capacity(ladder.len());
    for &y in ladder {
        let sol = solve_adaptive(map, C64::new(omega, y), opts)?;
        samples.push(LadderSample {
            y,
            tau: sol.tau_lift,
            residual: sol.residual,
            min_phi_prime: sol.min_phi_prime,
            n: sol.n,
            m: sol.m,
        });
    }
    extrapolate(omega, samples)
}

/// Extrapolates ladder samples to `y = 0`.
pub fn extrapolate(omega: f64, samples: Vec<LadderSample>) -> Result<BoundaryValue> {
    let ys: Vec<f64> = samples.iter().map(|s| s.y).collect();
    let taus: Vec<C64> = samples.iter().map(|s| s.tau).collect();
    let l = ys.len();
    // Extrapolants through the first k + 1 rungs.
    let diag: Vec<C64> = (0..l).map(|k| neville_at_zero(&ys[..=k], &taus[..=k])).collect();
    let gaps: Vec<f64> = diag.windows(2).map(|p| (p[1] - p[0]).norm()).collect();
    for pair in gaps.windows(2) {
        if pair[1] > 10.0 * pair[0] && pair[1] > 1e-9 {
            return Err(Error::ExtrapolationDiverged { gaps });
        }
    }
    let tau_lift = diag[l - 1];
    let tail = neville_at_zero(&ys[1..], &taus[1..]);
    let error_estimate = (tau_lift - tail).norm();
    // Boundary values live in the closed half-plane; tiny negative parts
    // are extrapolation noise.
    let clipped = C64::new(tau_lift.re, tau_lift.im.max(0.0));
    Ok(BoundaryValue { omega, tau: UpperHalfPoint::new(clipped)?, tau_lift, error_estimate, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_map::CircleMap;
    use std::f64::consts::PI;

    fn arnold() -> CircleMap {
        CircleMap::arnold(0.0, 1.0 / (4.0 * PI)).unwrap()
    }

    #[test]
    fn rotation_is_exact() {
        let r = CircleMap::rotation(0.3);
        let sol = complex_rotation_number(&r, C64::new(0.1, 0.2), 16, 68).unwrap();
        assert!((sol.tau_lift - C64::new(0.4, 0.2)).norm() < 1e-12);
        assert!(sol.coeff_up.iter().chain(&sol.coeff_down).all(|c| c.norm() < 1e-12));
        assert!(sol.residual < 1e-12);
        let sol0 = complex_rotation_number(&r, C64::new(0.1, 0.2), 0, 4).unwrap();
        assert!((sol0.tau_lift - C64::new(0.4, 0.2)).norm() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let f = arnold();
        assert_eq!(complex_rotation_number(&f, C64::new(0.0, 0.0), 8, 36).unwrap_err().name(), "NotInUpperHalfPlane");
        assert_eq!(complex_rotation_number(&f, C64::new(0.0, 0.1), 8, 35).unwrap_err().name(), "InvalidParameter");
        assert_eq!(complex_rotation_number(&f, C64::new(0.0, 1e-6), 8, 36).unwrap_err().name(), "HeightBelowMinimum");
    }

    #[test]
    fn arnold_on_imaginary_axis() {
        // golden values from an independent dense least-squares solve
        let f = arnold();
        for (y, im) in [(0.2, 0.2176815), (0.1, 0.1294027), (0.05, 0.0953714)] {
            let sol = solve_adaptive(&f, C64::new(0.0, y), &SolverOptions::default()).unwrap();
            assert!(sol.residual < 1e-8);
            let re = sol.tau.re.min(1.0 - sol.tau.re);
            assert!(re < 1e-8, "Re tau = {}", sol.tau.re);
            assert!((sol.tau.im - im).abs() < 2e-7, "y = {y}: {}", sol.tau.im);
            assert!(sol.min_phi_prime > 0.0 && !sol.non_injective());
            assert!(sol.condition < 100.0);
        }
    }

    #[test]
    fn solution_satisfies_functional_equation() {
        let f = CircleMap::new(0.1, vec![0.02], vec![0.05]).unwrap();
        let w = C64::new(0.13, 0.15);
        let sol = complex_rotation_number(&f, w, 64, 260).unwrap();
        assert!(sol.residual < 1e-9);
        assert!(sol.phi(C64::new(0.0, 0.0)).norm() < 1e-14);
        for x in [0.05, 0.31, 0.77] {
            let lhs = sol.phi(C64::new(f.value(x), 0.0) + w);
            let rhs = sol.phi(C64::new(x, 0.0)) + sol.tau_lift;
            assert!((lhs - rhs).norm() < 1e-8);
        }
        // Phi' against a central difference
        let z = C64::new(0.2, 0.07);
        let hh = 1e-6;
        let fd = (sol.phi(z + hh) - sol.phi(z - hh)) / (2.0 * hh);
        assert!((fd - sol.phi_prime(z)).norm() < 1e-6);
    }

    #[test]
    fn rotation_boundary_value() {
        let r = CircleMap::rotation(0.0);
        let b = boundary_tau(&r, 0.3, &default_ladder()).unwrap();
        assert!((b.tau.re - 0.3).abs() < 1e-10 && b.tau.im.abs() < 1e-10);
    }

    #[test]
    fn ladder_validation() {
        let f = arnold();
        assert!(boundary_tau(&f, 0.0, &[0.1]).is_err());
        assert!(boundary_tau(&f, 0.0, &[0.1, 0.2]).is_err());
        assert_eq!(boundary_tau(&f, 0.0, &[0.1, 1e-6]).unwrap_err().name(), "HeightBelowMinimum");
    }
}
