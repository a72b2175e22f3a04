//! Small numerical helpers: Gauss-Kronrod quadrature, root bracketing,
//! Neville extrapolation and a dense Hermitian solver.

use num_complex::Complex64 as C64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integral of `f` over `[a, b]` with absolute tolerance roughly `tol`.
/// Returns `(value, error_estimate)`.
pub fn adaptive_gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, whole: (f64, f64), depth: u32) -> (f64, f64) {
        if whole.1 <= tol || depth >= 40 || b - a < 1e-14 {
            return whole;
        }
        let m = 0.5 * (a + b);
        let left = gk15(f, a, m);
        let right = gk15(f, m, b);
        let l = rec(f, a, m, 0.5 * tol, left, depth + 1);
        let r = rec(f, m, b, 0.5 * tol, right, depth + 1);
        (l.0 + r.0, l.1 + r.1)
    }
    if b <= a {
        return (0.0, 0.0);
    }
    let whole = gk15(f, a, b);
    rec(f, a, b, tol, whole, 0)
}

/// Bisects `f` on `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, xtol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= xtol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Points in `(a, b)` where `f` changes sign on an `n`-point grid, refined
/// by bisection.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> Vec<f64> {
    let step = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 1..=n {
        let x1 = a + i as f64 * step;
        let f1 = f(x1);
        if f0 == 0.0 && i > 1 {
            out.push(x0);
        } else if (f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0) {
            out.push(bisect(&f, x0, x1, 1e-15));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Value at `x = 0` of the polynomial through `(xs[i], ys[i])`.
pub fn neville_at_zero(xs: &[f64], ys: &[C64]) -> C64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for m in 1..n {
        for i in 0..n - m {
            let (xi, xj) = (xs[i], xs[i + m]);
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
    }
    p[0]
}

/// In-place Cholesky `A = L L^*` of a Hermitian positive-definite matrix
/// stored row-major. Returns false when a pivot is not positive.
pub fn cholesky(a: &mut [C64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d -= a[j * n + k].norm_sqr();
        }
        if !(d > 0.0) {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = C64::new(d, 0.0);
        let (head, tail) = a.split_at_mut((j + 1) * n);
        let row_j = &head[j * n..j * n + j];
        for i in j + 1..n {
            let row_i = &mut tail[(i - j - 1) * n..(i - j) * n];
            let mut s = row_i[j];
            for k in 0..j {
                s -= row_i[k] * row_j[k].conj();
            }
            row_i[j] = s / d;
        }
    }
    true
}

/// Solves `L L^* x = b` given the factor from [`cholesky`].
pub fn cholesky_solve(l: &[C64], n: usize, b: &mut [C64]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i].re;
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i].conj() * b[k];
        }
        b[i] = s / l[i * n + i].re;
    }
}

/// Hermitian matrix-vector product, row-major.
pub fn matvec(a: &[C64], n: usize, x: &[C64]) -> Vec<C64> {
    (0..n)
        .map(|i| a[i * n..(i + 1) * n].iter().zip(x).map(|(u, v)| u * v).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_and_kinked() {
        let (v, e) = adaptive_gauss_kronrod(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-13);
        assert!((v - 2.0).abs() < 1e-13 && e < 1e-12);
        let (v, _) = adaptive_gauss_kronrod(&|x: f64| x.sqrt(), 0.0, 1.0, 1e-12);
        assert!((v - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn neville_recovers_polynomials() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<C64> = xs.iter().map(|&x| C64::new(1.0 + 2.0 * x - x * x * x, x)).collect();
        let v = neville_at_zero(&xs, &ys);
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn cholesky_roundtrip() {
        let n = 3;
        let a = vec![
            C64::new(4.0, 0.0), C64::new(1.0, 1.0), C64::new(0.0, -0.5),
            C64::new(1.0, -1.0), C64::new(3.0, 0.0), C64::new(0.2, 0.0),
            C64::new(0.0, 0.5), C64::new(0.2, 0.0), C64::new(2.0, 0.0),
        ];
        let x = vec![C64::new(1.0, 2.0), C64::new(-1.0, 0.5), C64::new(0.3, 0.0)];
        let mut b = matvec(&a, n, &x);
        let mut l = a.clone();
        assert!(cholesky(&mut l, n));
        cholesky_solve(&l, n, &mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).norm() < 1e-13);
        }
    }

    #[test]
    fn sign_change_roots() {
        let r = sign_changes(|x: f64| (std::f64::consts::TAU * x).sin(), 0.01, 1.01, 100);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.5).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
    }
}
