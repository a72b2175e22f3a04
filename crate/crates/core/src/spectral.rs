//! Least-squares solver for linear functional equations on `R/Z` whose
//! unknown columns are combinations of two families of grid vectors:
//! `E_m(j) = e^{2 pi i m j / M}` and `P_l(j) = e^{2 pi i l f(x_j)}`.
//!
//! Inner products between these vectors reduce to power sums and FFTs, so
//! the normal matrix costs `O(N M log M)` instead of `O(N^2 M)`.

use std::f64::consts::TAU;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::circle_map::C64;
use crate::error::{Error, Result};
use crate::quadrature::{cholesky, cholesky_solve, matvec};

/// Condition estimates above this are refused.
pub const CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Basis {
    /// `E_m` for `|m| <= N`.
    E(i64),
    /// `P_l` for `1 <= |l| <= N`.
    P(i64),
}

pub(crate) type Column = Vec<(C64, Basis)>;

const ZERO: C64 = C64::new(0.0, 0.0);

pub(crate) struct SpectralSystem {
    n: usize,
    m: usize,
    u: Vec<C64>,
    rhs: Vec<C64>,
    power_sums: Vec<C64>,
    g: Vec<C64>,
    rhs_fft: Vec<C64>,
    r_pos: Vec<C64>,
    r_neg: Vec<C64>,
    inverse: Arc<dyn Fft<f64>>,
}

impl SpectralSystem {
    /// `fx[j] = f(j/M)`; frequencies up to `n` may appear in the columns.
    pub fn new(fx: &[f64], rhs: Vec<C64>, n: usize) -> Self {
        let m = fx.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let u: Vec<C64> = fx.iter().map(|&f| C64::from_polar(1.0, TAU * f)).collect();

        let mut power_sums = vec![ZERO; 2 * n + 1];
        let mut r_pos = vec![ZERO; n + 1];
        let mut r_neg = vec![ZERO; n + 1];
        for j in 0..m {
            let mut pw = C64::new(1.0, 0.0);
            power_sums[0] += pw;
            for k in 1..=2 * n {
                pw *= u[j];
                power_sums[k] += pw;
                if k <= n {
                    r_pos[k] += pw * rhs[j];
                    r_neg[k] += pw.conj() * rhs[j];
                }
            }
        }

        // g[(l-1) * width + mm + n] = <E_mm, P_l> for l >= 1, |mm| <= n
        let width = 2 * n + 1;
        let mut g = vec![ZERO; n * width];
        let mut cur = vec![C64::new(1.0, 0.0); m];
        let mut buf = vec![ZERO; m];
        for l in 1..=n {
            for j in 0..m {
                cur[j] *= u[j];
            }
            buf.copy_from_slice(&cur);
            forward.process(&mut buf);
            for (idx, mm) in (-(n as i64)..=n as i64).enumerate() {
                g[(l - 1) * width + idx] = buf[mm.rem_euclid(m as i64) as usize];
            }
        }
        let mut rhs_fft = rhs.clone();
        forward.process(&mut rhs_fft);
        SpectralSystem { n, m, u, rhs, power_sums, g, rhs_fft, r_pos, r_neg, inverse }
    }

    fn power_sum(&self, d: i64) -> C64 {
        if d >= 0 {
            self.power_sums[d as usize]
        } else {
            self.power_sums[(-d) as usize].conj()
        }
    }

    /// `<E_mm, P_l>`.
    fn cross(&self, l: i64, mm: i64) -> C64 {
        let width = 2 * self.n + 1;
        let n = self.n as i64;
        if l > 0 {
            self.g[(l as usize - 1) * width + (mm + n) as usize]
        } else {
            self.g[((-l) as usize - 1) * width + (n - mm) as usize].conj()
        }
    }

    /// `sum_j conj(a_j) b_j`.
    fn inner(&self, a: Basis, b: Basis) -> C64 {
        match (a, b) {
            (Basis::E(x), Basis::E(y)) => {
                if x == y {
                    C64::new(self.m as f64, 0.0)
                } else {
                    ZERO
                }
            }
            (Basis::P(x), Basis::P(y)) => self.power_sum(y - x),
            (Basis::E(x), Basis::P(y)) => self.cross(y, x),
            (Basis::P(x), Basis::E(y)) => self.cross(x, y).conj(),
        }
    }

    fn project_rhs(&self, b: Basis) -> C64 {
        match b {
            Basis::E(x) => self.rhs_fft[x.rem_euclid(self.m as i64) as usize],
            Basis::P(x) if x > 0 => self.r_neg[x as usize],
            Basis::P(x) => self.r_pos[(-x) as usize],
        }
    }

    /// Least-squares solution and condition estimate of the column matrix.
    pub fn solve(&self, cols: &[Column]) -> Result<(Vec<C64>, f64)> {
        let dim = cols.len();
        let mut h = vec![ZERO; dim * dim];
        for a in 0..dim {
            for b in a..dim {
                let mut acc = ZERO;
                for &(ca, ba) in &cols[a] {
                    for &(cb, bb) in &cols[b] {
                        acc += ca.conj() * cb * self.inner(ba, bb);
                    }
                }
                h[a * dim + b] = acc;
                h[b * dim + a] = acc.conj();
            }
        }
        let mut sol: Vec<C64> = cols
            .iter()
            .map(|col| col.iter().map(|&(c, b)| c.conj() * self.project_rhs(b)).sum())
            .collect();
        let mut factor = h.clone();
        if !cholesky(&mut factor, dim) {
            return Err(Error::IllConditioned { condition: f64::INFINITY, limit: CONDITION_LIMIT });
        }
        let condition = condition_estimate(&h, &factor, dim);
        if !(condition <= CONDITION_LIMIT) {
            return Err(Error::IllConditioned { condition, limit: CONDITION_LIMIT });
        }
        cholesky_solve(&factor, dim, &mut sol);
        Ok((sol, condition))
    }

    /// `max_j |(A x)_j - rhs_j|`.
    pub fn residual(&self, cols: &[Column], x: &[C64]) -> f64 {
        let n = self.n;
        let m = self.m;
        let mut e = vec![ZERO; m];
        let mut p_pos = vec![ZERO; n];
        let mut p_neg = vec![ZERO; n];
        for (col, &xc) in cols.iter().zip(x) {
            for &(c, b) in col {
                match b {
                    Basis::E(k) => e[k.rem_euclid(m as i64) as usize] += c * xc,
                    Basis::P(l) if l > 0 => p_pos[l as usize - 1] += c * xc,
                    Basis::P(l) => p_neg[(-l) as usize - 1] += c * xc,
                }
            }
        }
        self.inverse.process(&mut e);
        let mut worst: f64 = 0.0;
        for (j, ej) in e.iter().enumerate().take(m) {
            let value = ej + horner(&p_pos, self.u[j]) + horner(&p_neg, self.u[j].conj());
            worst = worst.max((value - self.rhs[j]).norm());
        }
        worst
    }
}

/// `sum_k c_k x^k` for `k = 1..len`.
pub(crate) fn horner(c: &[C64], x: C64) -> C64 {
    c.iter().rev().fold(ZERO, |acc, &ck| (acc + ck) * x)
}

/// `sqrt(lambda_max / lambda_min)` of the normal matrix, i.e. the
/// condition number of the least-squares matrix itself.
fn condition_estimate(h: &[C64], factor: &[C64], dim: usize) -> f64 {
    let start: Vec<C64> =
        (0..dim).map(|i| C64::new(1.0 + 0.37 * (i % 7) as f64, 0.11 * (i % 5) as f64)).collect();
    let normalize = |v: &mut Vec<C64>| -> f64 {
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= nrm;
        }
        nrm
    };
    let mut v = start.clone();
    normalize(&mut v);
    let mut lmax = 0.0;
    for _ in 0..40 {
        let mut hv = matvec(h, dim, &v);
        lmax = normalize(&mut hv);
        v = hv;
    }
    let mut v = start;
    normalize(&mut v);
    let mut inv_lmin = 0.0;
    for _ in 0..20 {
        cholesky_solve(factor, dim, &mut v);
        inv_lmin = normalize(&mut v);
    }
    (lmax * inv_lmin).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense evaluation of a column on the grid.
    fn column_values(col: &Column, fx: &[f64]) -> Vec<C64> {
        let m = fx.len();
        (0..m)
            .map(|j| {
                col.iter()
                    .map(|&(c, b)| match b {
                        Basis::E(k) => c * C64::from_polar(1.0, TAU * k as f64 * j as f64 / m as f64),
                        Basis::P(l) => c * C64::from_polar(1.0, TAU * l as f64 * fx[j]),
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn fast_normal_equations_match_dense_ones() {
        let n = 3;
        let m = 16;
        let fx: Vec<f64> = (0..m).map(|j| {
            let x = j as f64 / m as f64;
            x + 0.2 + 0.05 * (TAU * x).sin()
        }).collect();
        let rhs: Vec<C64> = (0..m).map(|j| C64::new((j as f64).sin(), 0.3 * j as f64)).collect();
        let sys = SpectralSystem::new(&fx, rhs.clone(), n);
        let cols: Vec<Column> = vec![
            vec![(C64::new(0.5, 0.1), Basis::P(2)), (C64::new(-1.0, 0.0), Basis::E(2))],
            vec![(C64::new(1.0, 0.0), Basis::P(-3)), (C64::new(0.2, -0.3), Basis::E(-1))],
            vec![(C64::new(-1.0, 0.0), Basis::E(0))],
            vec![(C64::new(0.0, 1.0), Basis::P(1))],
        ];
        let dense: Vec<Vec<C64>> = cols.iter().map(|c| column_values(c, &fx)).collect();
        for a in 0..cols.len() {
            for b in 0..cols.len() {
                let direct: C64 = dense[a].iter().zip(&dense[b]).map(|(x, y)| x.conj() * y).sum();
                let fast: C64 = cols[a]
                    .iter()
                    .flat_map(|&(ca, ba)| cols[b].iter().map(move |&(cb, bb)| (ca, ba, cb, bb)))
                    .map(|(ca, ba, cb, bb)| ca.conj() * cb * sys.inner(ba, bb))
                    .sum();
                assert!((direct - fast).norm() < 1e-12, "{a} {b}");
            }
            let direct: C64 = dense[a].iter().zip(&rhs).map(|(x, y)| x.conj() * y).sum();
            let fast: C64 = cols[a].iter().map(|&(c, b)| c.conj() * sys.project_rhs(b)).sum();
            assert!((direct - fast).norm() < 1e-12);
        }
        let (x, cond) = sys.solve(&cols).unwrap();
        assert!(cond >= 1.0);
        let res = sys.residual(&cols, &x);
        let dense_res = (0..m)
            .map(|j| ((0..cols.len()).map(|c| dense[c][j] * x[c]).sum::<C64>() - rhs[j]).norm())
            .fold(0.0, f64::max);
        assert!((res - dense_res).abs() < 1e-12);
    }
}
