//! Acceptance suite: one PASS/FAIL line per criterion, then a single
//! assertion over all of them.

use std::f64::consts::PI;
use std::time::Instant;

use complex_rotation::circle_map::{iterate, total_distortion};
use complex_rotation::experiments::bubble::{hyperbolic_components, nonempty_plateau, trace_component};
use complex_rotation::experiments::profile::displacement_maxima;
use complex_rotation::experiments::tsujii::tune_mean_shift;
use complex_rotation::experiments::{trace_bubble, tsujii_gap, two_humped_family, BubbleTrace, TraceOptions};
use complex_rotation::linearizer::{qc_estimate_check, xi_distortion_from, ChartSystem};
use complex_rotation::real_dynamics::find_cycles;
use complex_rotation::uniformizer::{boundary_tau, boundary_tau_with, default_ladder, solve_adaptive, SolverOptions};
use complex_rotation::welder::{asymptote_check, welding_constant};
use complex_rotation::{CircleMap, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn arnold() -> CircleMap {
    CircleMap::arnold(0.0, 1.0 / (4.0 * PI)).unwrap()
}

fn golden() -> f64 {
    0.5 * (5f64.sqrt() - 1.0)
}

fn list(v: &[f64], digits: usize, sci: bool) -> String {
    let items: Vec<String> =
        v.iter().map(|x| if sci { format!("{x:.digits$e}") } else { format!("{x:.digits$}") }).collect();
    format!("[{}]", items.join(", "))
}

/// Distance in `C/Z`.
fn mod1_distance(a: C64, b: C64) -> f64 {
    let d = a - b;
    C64::new(d.re - d.re.round(), d.im).norm()
}

fn rotation_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let theta: f64 = rng.gen_range(0.0..1.0);
        let f = CircleMap::rotation(theta);
        for _ in 0..10 {
            let w = C64::new(rng.gen_range(0.0..1.0), rng.gen_range(0.1..5.0));
            let sol = solve_adaptive(&f, w, &SolverOptions::default()).unwrap();
            worst = worst.max(mod1_distance(sol.tau_lift, C64::new(theta, 0.0) + w));
        }
    }
    (worst < 1e-10, format!("max |tau - (theta + omega)| = {worst:.3e} over 200 solves"))
}

fn welding_asymptote() -> Outcome {
    let start = Instant::now();
    let f = arnold();
    let weld = welding_constant(&f, 64, 260).unwrap();
    let gaps = asymptote_check(&f, &weld, &[1.0, 2.0, 3.0]).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let decreasing = gaps.windows(2).all(|g| g[1] < g[0]);
    let ok = decreasing && gaps[2] < 1e-6 && secs < 30.0;
    let gaps_s = list(&gaps, 3, true);
    (ok, format!("C_f = {:.10}, gaps {gaps_s}, {secs:.1} s", weld.c_f))
}

/// Random maps with `2 pi sum k (|a_k| + |b_k|) <= 0.9`.
fn random_map(rng: &mut ChaCha8Rng) -> CircleMap {
    let k = rng.gen_range(1..=3usize);
    let mut raw: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let size: f64 = raw.iter().enumerate().map(|(i, (a, b))| 2.0 * PI * (i + 1) as f64 * (a.abs() + b.abs())).sum();
    let scale = rng.gen_range(0.3..0.9) / size;
    raw.iter_mut().for_each(|(a, b)| {
        *a *= scale;
        *b *= scale;
    });
    let (cos, sin) = raw.into_iter().unzip();
    CircleMap::new(rng.gen_range(0.0..1.0), cos, sin).unwrap()
}

fn multiplier_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let fractions = [(0, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 4), (2, 5)];
    let (mut cycles, mut worst) = (0usize, f64::NEG_INFINITY);
    for _ in 0..50 {
        let f = random_map(&mut rng);
        let d_f = total_distortion(&f).unwrap().value;
        let (p, q) = fractions[rng.gen_range(0..fractions.len())];
        let Ok(pl) = nonempty_plateau(&f, p, q) else { continue };
        let g = f.shifted(0.5 * (pl.omega_lo + pl.omega_hi));
        for c in find_cycles(&g, p, q).unwrap() {
            cycles += 1;
            worst = worst.max(c.log_multiplier().abs() - d_f);
        }
    }
    (cycles >= 50 && worst <= 1e-8, format!("{cycles} cycles, max |log rho| - D_f = {worst:.4}"))
}

fn disk_containment() -> Outcome {
    let f = arnold();
    let bv = boundary_tau(&f, 0.0, &default_ladder()).unwrap();
    let t = bv.tau.lift_near(0.0);
    let r = t.norm_sqr() / (2.0 * t.im);
    let coarse = total_distortion(&f).unwrap().value / (4.0 * PI);
    let ok = r <= 0.0407168 + 1e-4 && r <= coarse + 1e-4;
    (ok, format!("tau_bar = {:.10}i (err {:.1e}), radius {r:.7}, D_f/4pi = {coarse:.6}", t.im, bv.error_estimate))
}

fn sigma_cross_check() -> Outcome {
    let f = arnold();
    let bv = boundary_tau(&f, 0.0, &default_ladder()).unwrap();
    let rep = qc_estimate_check(&f, 0, 1, bv.tau).unwrap();
    let ok = rep.distance <= rep.bound_f + 0.1;
    (ok, format!("d = {:.4} <= 5 D_f + 0.1 = {:.4}, sigma = {:.5}", rep.distance, rep.bound_f + 0.1, rep.sigma))
}

fn q_fold_cover() -> Outcome {
    let family = CircleMap::new(0.0, vec![0.0, 0.0], vec![0.0, 0.05]).unwrap();
    let pl = nonempty_plateau(&family, 1, 2).unwrap();
    let comps = hyperbolic_components(&family, &pl, 128);
    let (lo, hi, _) = comps[0];
    let f = family.shifted(0.5 * (lo + hi));
    // f o f needs about four times the cutoff of f at equal height, so the
    // ladder stays at y >= 0.008 and uses more rungs
    let ladder = [0.032, 0.028, 0.024, 0.020, 0.016, 0.012, 0.008];
    let opts = SolverOptions { n_max: 1024, ..SolverOptions::default() };
    let tf = boundary_tau_with(&f, 0.0, &ladder, &opts).unwrap();
    let tg = boundary_tau_with(&iterate(&f, 2).unwrap(), 0.0, &ladder, &opts).unwrap();
    let d = mod1_distance(tg.tau.value(), 2.0 * tf.tau.value());
    let detail = format!(
        "|tau_bar(f o f) - 2 tau_bar(f)| mod 1 = {d:.3e} at omega = {:.6} (errors {:.1e}, {:.1e})",
        0.5 * (lo + hi),
        tf.error_estimate,
        tg.error_estimate
    );
    (d < 1e-4, detail)
}

fn diophantine_limit() -> Outcome {
    let g = tune_mean_shift(&arnold(), golden()).unwrap();
    let bv = boundary_tau_with(&g, 0.0, &[0.2, 0.1, 0.05, 0.025], &SolverOptions::default()).unwrap();
    let target = C64::new(golden(), 0.0);
    let dist: Vec<f64> = bv.samples.iter().map(|s| mod1_distance(s.tau, target)).collect();
    // |tau(iy) - rot| is about y here, so the threshold applies to the limit
    let limit = mod1_distance(bv.tau_lift, target);
    let ok = dist.windows(2).all(|d| d[1] < d[0]) && limit < 5e-3;
    (ok, format!("|tau - rot| = {}, extrapolated to y = 0: {limit:.3e}", list(&dist, 4, true)))
}

fn arnold_trace() -> BubbleTrace {
    trace_bubble(&arnold(), 0, 1, &TraceOptions { samples: 24, ..TraceOptions::default() }).unwrap()
}

fn real_endpoints(trace: &BubbleTrace) -> Outcome {
    let s: Vec<f64> = trace.samples().map(|s| s.horocycle_height).collect();
    let n = s.len();
    // toward each endpoint, edge-most sample last
    let left: Vec<f64> = s[..5].iter().rev().copied().collect();
    let right: Vec<f64> = s[n - 5..].to_vec();
    let ok = [&left, &right].iter().all(|g| g.windows(2).all(|w| w[1] < w[0]) && g[4] < 1e-2);
    let left_s = list(&left, 3, true);
    let right_s = list(&right, 3, true);
    (ok, format!("h toward left {left_s}, toward right {right_s}"))
}

fn complex_endpoint() -> Outcome {
    let f = two_humped_family(0.05, 0.03).unwrap();
    let m = displacement_maxima(&f);
    let (y1, y2) = (m[0].1, m[1].1);
    let comp = trace_component(&f, 0, 1, (y1, y2, 2), &TraceOptions::default()).unwrap();
    let angles: Vec<f64> = comp.samples[..5].iter().rev().map(|s| s.tangency_angle).collect();
    let floor = comp.samples[..5].iter().map(|s| s.horocycle_height).fold(f64::INFINITY, f64::min);
    let ok = angles.windows(2).all(|a| a[1] < a[0]) && floor >= 1e-3;
    let angles_s = list(&angles, 4, false);
    (ok, format!("angles toward {y1:.6}: {angles_s}, min h = {floor:.4}"))
}

fn tsujii() -> Outcome {
    let g = tune_mean_shift(&arnold(), golden()).unwrap();
    let reps = tsujii_gap(&g, 4).unwrap();
    let fractions: Vec<(i64, u32)> = reps.iter().map(|r| (r.p, r.q)).collect();
    let strict = reps.iter().all(|r| r.slack > 0.0);
    let rigid = tsujii_gap(&CircleMap::rotation(golden()), 4).unwrap();
    let equality = rigid.iter().map(|r| (r.omega0.abs() - r.bound).abs()).fold(0.0, f64::max);
    let ok = fractions == [(1, 1), (1, 2), (2, 3), (3, 5)] && strict && equality < 1e-10;
    let slacks: Vec<f64> = reps.iter().map(|r| r.slack).collect();
    let slacks_s = list(&slacks, 4, true);
    (ok, format!("slacks {slacks_s}, rotation family max ||omega0| - bound| = {equality:.1e}"))
}

fn symmetry(trace: &BubbleTrace) -> Outcome {
    let opts = TraceOptions { samples: 24, ..TraceOptions::default() };
    let mirror = trace_bubble(&arnold().mirrored(), 0, 1, &opts).unwrap();
    let a: Vec<_> = trace.samples().collect();
    let b: Vec<_> = mirror.samples().collect();
    if a.len() != b.len() {
        return (false, format!("{} vs {} samples", a.len(), b.len()));
    }
    let worst = a
        .iter()
        .zip(b.iter().rev())
        .map(|(s, m)| {
            let conj = C64::new(-m.tau_re, m.tau_im);
            mod1_distance(C64::new(s.tau_re, s.tau_im), conj).max((s.omega + m.omega).abs())
        })
        .fold(0.0, f64::max);
    (worst < 1e-6, format!("max pointwise mismatch {worst:.2e} over {} samples", a.len()))
}

fn gluing_distortion() -> Outcome {
    let f = arnold();
    let sys = ChartSystem::new(&f, 0, 1).unwrap();
    let bound = 4.0 * total_distortion(&iterate(&f, 1).unwrap()).unwrap().value + 1e-6;
    let xi: Vec<f64> = (0..sys.len()).map(|j| xi_distortion_from(&f, &sys, j).unwrap()).collect();
    let xi_s = list(&xi, 4, true);
    (xi.iter().all(|&x| x <= bound), format!("xi distortions {xi_s} <= {bound:.4}"))
}

#[test]
fn acceptance() {
    let trace = arnold_trace();
    let criteria: Vec<Criterion<'_>> = vec![
        ("rotation exactness", Box::new(rotation_exactness)),
        ("welding asymptote", Box::new(welding_asymptote)),
        ("multiplier bound", Box::new(multiplier_bound)),
        ("disk containment", Box::new(disk_containment)),
        ("sigma cross-check", Box::new(sigma_cross_check)),
        ("q-fold cover", Box::new(q_fold_cover)),
        ("Diophantine boundary limit", Box::new(diophantine_limit)),
        ("real endpoints", Box::new(|| real_endpoints(&trace))),
        ("complex endpoint tangency", Box::new(complex_endpoint)),
        ("Tsujii inequality", Box::new(tsujii)),
        ("symmetry covariance", Box::new(|| symmetry(&trace))),
        ("gluing distortion", Box::new(gluing_distortion)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = check();
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {detail} [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
        if !ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
