//! Hand-written SVG of bubbles over the segment `[0, 1)`, with the disks
//! of radius `D_f / (4 pi q^2)` tangent at each `p/q`.

use std::fmt::Write;

use super::bubble::{BubbleSample, BubbleTrace};
use crate::real_dynamics::gcd;

/// Vertical exaggeration of the plot.
pub const VERTICAL_SCALE: f64 = 10.0;

const WIDTH: f64 = 1000.0;
const MARGIN: f64 = 60.0;
const LEGEND: f64 = 70.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn disks(d_f: f64, disk_q_max: u32) -> Vec<(f64, f64)> {
    (1..=disk_q_max)
        .flat_map(|q| {
            (0..q as i64)
                .filter(move |&p| gcd(p, q as i64) == 1)
                .map(move |p| (p as f64 / q as f64, d_f / (4.0 * std::f64::consts::PI * (q * q) as f64)))
        })
        .collect()
}

/// Plot frame: axis, ticks, disks and legend around a body drawn in
/// `(Re, Im)` coordinates.
struct Frame {
    base: f64,
    height: f64,
}

impl Frame {
    fn new(top: f64) -> Self {
        let base = MARGIN + (top * VERTICAL_SCALE * WIDTH).max(100.0);
        Frame { base, height: base + MARGIN + LEGEND }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + x * WIDTH
    }

    fn py(&self, y: f64) -> f64 {
        self.base - y * VERTICAL_SCALE * WIDTH
    }

    fn render(&self, body: &str, d_f: f64, disk_q_max: u32, note: &str) -> String {
        let (base, height) = (self.base, self.height);
        let mut s = String::new();
        let total_w = WIDTH + 2.0 * MARGIN;
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{height:.0}" viewBox="0 0 {total_w:.0} {height:.0}">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r##"<g fill="none" stroke="#999999" stroke-width="0.8">"##);
        for (c, r) in disks(d_f, disk_q_max) {
            let _ = writeln!(
                s,
                r#"<ellipse cx="{:.3}" cy="{:.3}" rx="{:.3}" ry="{:.3}"/>"#,
                self.px(c),
                self.py(r),
                r * WIDTH,
                r * VERTICAL_SCALE * WIDTH
            );
        }
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{base:.3}" x2="{:.3}" y2="{base:.3}" stroke="black" stroke-width="1"/>"#,
            self.px(0.0),
            self.px(1.0)
        );
        let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11" text-anchor="middle">"#);
        for q in 1..=disk_q_max.max(1) {
            for p in 0..=q as i64 {
                if gcd(p, q as i64) != 1 {
                    continue;
                }
                let x = self.px(p as f64 / q as f64);
                let _ = writeln!(s, r#"<line x1="{x:.3}" y1="{base:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/>"#, base + 5.0);
                let _ = writeln!(s, r#"<text x="{x:.3}" y="{:.3}">{p}/{q}</text>"#, base + 18.0);
            }
        }
        let _ = writeln!(s, "</g>");
        s.push_str(body);
        let ly = base + 40.0;
        let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="12">"#);
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN:.0}" y="{ly:.0}">Vertical scale exaggerated {VERTICAL_SCALE:.0}x relative to horizontal. {note}</text>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN:.0}" y="{:.0}">Gray: disks of radius D_f/(4 pi q^2) tangent at p/q, q &lt;= {disk_q_max}; D_f = {d_f:.6}.</text>"#,
            ly + 16.0
        );
        let _ = writeln!(s, "</g>");
        s.push_str("</svg>\n");
        s
    }
}

fn disk_top(d_f: f64, disk_q_max: u32) -> f64 {
    disks(d_f, disk_q_max).iter().map(|d| 2.0 * d.1).fold(0.0, f64::max)
}

/// Renders the bubbles of `traces` as polylines together with the disks
/// for all `p/q` in `[0, 1)` with `q <= disk_q_max`.
pub fn render_bubbles(traces: &[BubbleTrace], d_f: f64, disk_q_max: u32) -> String {
    let top = traces.iter().flat_map(|t| t.samples()).map(|s| s.tau_im).fold(disk_top(d_f, disk_q_max), f64::max);
    let frame = Frame::new(top);
    let mut body = String::new();
    for (i, t) in traces.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let center = t.p as f64 / t.q as f64;
        let copies: &[f64] = if center.rem_euclid(1.0) == 0.0 { &[0.0, 1.0] } else { &[0.0] };
        for comp in &t.components {
            for &shift in copies {
                let mut pts = String::new();
                for smp in &comp.samples {
                    let re = smp.tau_re + (center - smp.tau_re).round() - center.floor() + shift;
                    let _ = write!(pts, "{:.3},{:.3} ", frame.px(re), frame.py(smp.tau_im));
                }
                let _ = writeln!(
                    body,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    pts.trim_end()
                );
            }
        }
    }
    frame.render(&body, d_f, disk_q_max, "Curves: boundary values over plateaus.")
}

/// Renders sweep samples as dots, real parts reduced to `[0, 1)`.
pub fn render_atlas(samples: &[BubbleSample], d_f: f64, disk_q_max: u32) -> String {
    let top = samples.iter().map(|s| s.tau_im).fold(disk_top(d_f, disk_q_max), f64::max);
    let frame = Frame::new(top);
    let mut body = String::new();
    let _ = writeln!(body, r##"<g fill="#1f77b4">"##);
    for s in samples {
        let _ = writeln!(
            body,
            r#"<circle cx="{:.3}" cy="{:.3}" r="1.8"/>"#,
            frame.px(s.tau_re.rem_euclid(1.0)),
            frame.py(s.tau_im)
        );
    }
    let _ = writeln!(body, "</g>");
    frame.render(&body, d_f, disk_q_max, "Dots: boundary values on an omega grid.")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::bubble::{BubbleSample, ComponentTrace, EndpointReport, Side};
    use crate::real_dynamics::{EndpointKind, Plateau};

    fn endpoint(side: Side) -> EndpointReport {
        EndpointReport { omega0: 0.0, side, kind: EndpointKind::None, evidence: vec![] }
    }

    #[test]
    fn disks_and_legend() {
        let svg = render_bubbles(&[], 1.0, 5);
        // phi(1) + ... + phi(5) = 1 + 1 + 2 + 2 + 4
        assert_eq!(svg.matches("<ellipse").count(), 10);
        assert!(svg.contains("exaggerated 10x"));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        let dots = render_atlas(&[BubbleSample::new(0.0, 0, 1, 1.25, 0.0, 0.0)], 1.0, 1);
        assert_eq!(dots.matches("<circle").count(), 1);
        assert!(dots.contains(r#"cx="310.000""#));
    }

    #[test]
    fn bubble_at_zero_is_drawn_twice() {
        let samples = vec![BubbleSample::new(0.0, 0, 1, 0.99, 0.05, 0.0), BubbleSample::new(0.1, 0, 1, 0.01, 0.05, 0.0)];
        let comp = ComponentTrace {
            omega_lo: -0.1,
            omega_hi: 0.1,
            periodic_points: 2,
            samples,
            left: endpoint(Side::Left),
            right: endpoint(Side::Right),
        };
        let plateau = Plateau {
            p: 0,
            q: 1,
            omega_lo: -0.1,
            omega_hi: 0.1,
            lo_kind: EndpointKind::Real,
            hi_kind: EndpointKind::Real,
        };
        let t = BubbleTrace { p: 0, q: 1, plateau, components: vec![comp] };
        let svg = render_bubbles(std::slice::from_ref(&t), 1.0, 2);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg, render_bubbles(&[t], 1.0, 2));
    }
}
