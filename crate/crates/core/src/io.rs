//! Tabular and JSON outputs. Every CSV row type can be read back and
//! re-validated against the invariants of the data it came from.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::bubble::{horocycle, BubbleSample};
use crate::real_dynamics::{Cycle, CycleKind};
use crate::uniformizer::{min_collocation, BoundaryValue, ConjugacySolution};

/// Relative slack when re-deriving stored quantities.
const REINGEST_TOL: f64 = 1e-9;

/// One periodic point: `(p, q, point, rho, kind)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleRow {
    pub p: i64,
    pub q: u32,
    pub point: f64,
    pub rho: f64,
    pub kind: CycleKind,
}

impl CycleRow {
    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || !(0.0..1.0).contains(&self.point) || !(self.rho > 0.0) {
            return Err(invalid(format!("cycle row out of range: {self:?}")));
        }
        if CycleKind::classify(self.rho) != self.kind {
            return Err(invalid(format!("kind {} disagrees with rho = {}", self.kind.as_str(), self.rho)));
        }
        Ok(())
    }
}

/// One row per periodic point, orbits in the given order.
pub fn cycle_rows(cycles: &[Cycle]) -> Vec<CycleRow> {
    cycles
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |&point| CycleRow {
                p: c.winding,
                q: c.period,
                point,
                rho: c.multiplier,
                kind: c.kind,
            })
        })
        .collect()
}

/// One solve: `(re_omega, im_omega, re_tau, im_tau, residual, min_phi_prime, N, M)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauRow {
    pub re_omega: f64,
    pub im_omega: f64,
    pub re_tau: f64,
    pub im_tau: f64,
    pub residual: f64,
    pub min_phi_prime: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl TauRow {
    pub fn validate(&self) -> Result<()> {
        if !(self.im_omega > 0.0) || !(self.im_tau > 0.0) {
            return Err(invalid(format!("omega and tau must lie in the upper half-plane: {self:?}")));
        }
        if self.n < 1 || self.m < min_collocation(self.n) || !(self.residual >= 0.0) {
            return Err(invalid(format!("inconsistent discretization: {self:?}")));
        }
        Ok(())
    }
}

impl From<&ConjugacySolution> for TauRow {
    fn from(s: &ConjugacySolution) -> Self {
        TauRow {
            re_omega: s.omega.re,
            im_omega: s.omega.im,
            re_tau: s.tau_lift.re,
            im_tau: s.tau_lift.im,
            residual: s.residual,
            min_phi_prime: s.min_phi_prime,
            n: s.n,
            m: s.m,
        }
    }
}

/// The ladder rungs behind a boundary value.
pub fn ladder_rows(bv: &BoundaryValue) -> Vec<TauRow> {
    bv.samples
        .iter()
        .map(|s| TauRow {
            re_omega: bv.omega,
            im_omega: s.y,
            re_tau: s.tau.re,
            im_tau: s.tau.im,
            residual: s.residual,
            min_phi_prime: s.min_phi_prime,
            n: s.n,
            m: s.m,
        })
        .collect()
}

/// JSON report of a single solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauReport {
    pub omega_re: f64,
    pub omega_im: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub residual: f64,
    pub min_phi_prime: f64,
    pub non_injective: bool,
    pub condition: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
}

impl From<&ConjugacySolution> for TauReport {
    fn from(s: &ConjugacySolution) -> Self {
        TauReport {
            omega_re: s.omega.re,
            omega_im: s.omega.im,
            tau_re: s.tau.re,
            tau_im: s.tau.im,
            residual: s.residual,
            min_phi_prime: s.min_phi_prime,
            non_injective: s.non_injective(),
            condition: s.condition,
            n: s.n,
            m: s.m,
        }
    }
}

/// One bubble sample: `(omega, p, q, tau_re, tau_im, h, angle, err)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleRow {
    pub omega: f64,
    pub p: i64,
    pub q: u32,
    pub tau_re: f64,
    pub tau_im: f64,
    pub h: f64,
    pub angle: f64,
    pub err: f64,
}

impl BubbleRow {
    pub fn validate(&self) -> Result<()> {
        if self.q == 0 || !(self.tau_im >= 0.0) || !(self.err >= 0.0) {
            return Err(invalid(format!("bubble row out of range: {self:?}")));
        }
        let (h, angle) = horocycle(self.p, self.q, self.tau_re, self.tau_im);
        let close = |a: f64, b: f64| a == b || (a - b).abs() <= REINGEST_TOL * a.abs().max(1.0);
        if !close(h, self.h) || !close(angle, self.angle) {
            return Err(invalid(format!("h or angle disagree with tau: {self:?}")));
        }
        Ok(())
    }
}

impl From<&BubbleSample> for BubbleRow {
    fn from(s: &BubbleSample) -> Self {
        BubbleRow {
            omega: s.omega,
            p: s.p,
            q: s.q,
            tau_re: s.tau_re,
            tau_im: s.tau_im,
            h: s.horocycle_height,
            angle: s.tangency_angle,
            err: s.error_estimate,
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidParameter(msg)
}

/// CSV text with a header line.
pub fn to_csv<T: Serialize>(rows: &[T], header: &[&str]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("flat rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

pub const CYCLE_HEADER: [&str; 5] = ["p", "q", "point", "rho", "kind"];
pub const TAU_HEADER: [&str; 8] = ["re_omega", "im_omega", "re_tau", "im_tau", "residual", "min_phi_prime", "N", "M"];
pub const BUBBLE_HEADER: [&str; 8] = ["omega", "p", "q", "tau_re", "tau_im", "h", "angle", "err"];

/// Parses CSV text produced by [`to_csv`].
pub fn from_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| invalid(format!("malformed CSV: {e}")))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
