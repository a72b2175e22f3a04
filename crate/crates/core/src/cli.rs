//! Command-line front end: flag parsing, JSON config overrides,
//! validation, dispatch and file output.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::circle_map::{total_distortion, CircleMap, MapDescriptor, C64};
use crate::error::Error;
use crate::experiments::{atlas, render_atlas, render_bubbles, trace_bubble, tsujii_gap, TraceOptions};
use crate::io::{
    cycle_rows, ladder_rows, to_csv, to_json, BubbleRow, TauReport, TauRow, BUBBLE_HEADER, CYCLE_HEADER, TAU_HEADER,
};
use crate::linearizer::sigma;
use crate::real_dynamics::{find_cycles, gcd, rotation, Rotation};
use crate::uniformizer::{
    boundary_tau_with, complex_rotation_number, default_ladder, min_collocation, solve_adaptive, SolverOptions,
};
use crate::welder::welding_constant;

/// Smallest frequency cutoff accepted on the command line.
pub const MIN_N: usize = 8;
/// Cutoff used by `weld` when `--n` is absent.
pub const DEFAULT_WELD_N: usize = 64;
/// Largest disk denominator drawn in plots.
pub const PLOT_DISK_Q: u32 = 5;

#[derive(Debug, Parser)]
#[command(name = "crot", version, about = "Complex rotation numbers of analytic circle diffeomorphisms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Rotation number of the map.
    Rot,
    /// Periodic orbits of rotation type `--pq`.
    Cycles,
    /// Complex rotation number at `--omega`.
    Tau,
    /// Boundary value at real `--omega`, extrapolated over `--ladder`.
    Boundary,
    /// Boundary values over the `--pq` plateau.
    Trace,
    /// The welding constant.
    Weld,
    /// Linearizing data of the `--pq` cycles.
    Sigma,
    /// Parameter gaps of the rational approximants.
    Tsujii,
    /// Boundary values over an `omega` grid of one period.
    Atlas,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rot => "rot",
            Command::Cycles => "cycles",
            Command::Tau => "tau",
            Command::Boundary => "boundary",
            Command::Trace => "trace",
            Command::Weld => "weld",
            Command::Sigma => "sigma",
            Command::Tsujii => "tsujii",
            Command::Atlas => "atlas",
        }
    }

    /// Formats the command can emit; the first is the default.
    fn formats(self) -> &'static [Emit] {
        match self {
            Command::Cycles => &[Emit::Csv, Emit::Json],
            Command::Tau | Command::Boundary => &[Emit::Json, Emit::Csv],
            Command::Trace | Command::Atlas => &[Emit::Csv, Emit::Json, Emit::Svg],
            Command::Rot | Command::Weld | Command::Sigma | Command::Tsujii => &[Emit::Json],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Csv,
    Json,
    Svg,
}

impl Emit {
    pub fn extension(self) -> &'static str {
        match self {
            Emit::Csv => "csv",
            Emit::Json => "json",
            Emit::Svg => "svg",
        }
    }

    fn parse(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(Emit::Csv),
            "json" => Ok(Emit::Json),
            "svg" => Ok(Emit::Svg),
            other => Err(format!("unknown emit format {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Map descriptor: a JSON file, or inline JSON.
    #[arg(long, global = true)]
    pub map: Option<String>,
    /// JSON config whose fields override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// `RE,IM` (or `RE` for real parameters).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega: Option<String>,
    /// Rotation type `P/Q`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub pq: Option<String>,
    /// Frequency cutoff.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Collocation points, at least 4N+4.
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Decreasing heights `Y1,Y2,...`.
    #[arg(long, global = true)]
    pub ladder: Option<String>,
    /// Output directory; without it the first format goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated formats among csv, json, svg.
    #[arg(long, global = true)]
    pub emit: Option<String>,
    /// Worker threads for `trace` and `atlas`.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Samples per component (`trace`) or grid size (`atlas`).
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Number of approximants for `tsujii`.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Rotation-number tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Residual at which adaptive solves stop refining.
    #[arg(long, global = true)]
    pub residual_target: Option<f64>,
    /// Largest cutoff for adaptive solves.
    #[arg(long, global = true)]
    pub n_max: Option<usize>,
}

/// Where the map comes from in a JSON config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSource {
    Inline(MapDescriptor),
    Path(PathBuf),
}

/// A partial configuration; JSON configs use the same field names as the
/// flags, with `omega` as `[re, im]`, `ladder` as a list and `emit` as a
/// list of formats.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigPatch {
    pub map: Option<MapSource>,
    pub omega: Option<[f64; 2]>,
    pub pq: Option<String>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub ladder: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub emit: Option<Vec<Emit>>,
    pub workers: Option<usize>,
    pub samples: Option<usize>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub residual_target: Option<f64>,
    pub n_max: Option<usize>,
}

impl ConfigPatch {
    /// Fields of `other` replace those of `self`.
    pub fn overridden_by(self, other: ConfigPatch) -> ConfigPatch {
        ConfigPatch {
            map: other.map.or(self.map),
            omega: other.omega.or(self.omega),
            pq: other.pq.or(self.pq),
            n: other.n.or(self.n),
            m: other.m.or(self.m),
            ladder: other.ladder.or(self.ladder),
            out: other.out.or(self.out),
            emit: other.emit.or(self.emit),
            workers: other.workers.or(self.workers),
            samples: other.samples.or(self.samples),
            depth: other.depth.or(self.depth),
            tol: other.tol.or(self.tol),
            residual_target: other.residual_target.or(self.residual_target),
            n_max: other.n_max.or(self.n_max),
        }
    }
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("cannot parse {what} entry {t:?}")))
        .collect()
}

impl TryFrom<&Flags> for ConfigPatch {
    type Error = String;

    fn try_from(f: &Flags) -> Result<Self, String> {
        let map = f.map.as_ref().map(|m| {
            if m.trim_start().starts_with('{') {
                serde_json::from_str(m).map(MapSource::Inline).map_err(|e| format!("inline map: {e}"))
            } else {
                Ok(MapSource::Path(PathBuf::from(m)))
            }
        });
        let omega = f
            .omega
            .as_ref()
            .map(|s| match parse_list(s, "omega")?.as_slice() {
                [re] => Ok([*re, 0.0]),
                [re, im] => Ok([*re, *im]),
                _ => Err(format!("omega must be RE or RE,IM, got {s:?}")),
            })
            .transpose()?;
        let emit = f
            .emit
            .as_ref()
            .map(|s| s.split(',').map(Emit::parse).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        Ok(ConfigPatch {
            map: map.transpose()?,
            omega,
            pq: f.pq.clone(),
            n: f.n,
            m: f.m,
            ladder: f.ladder.as_deref().map(|s| parse_list(s, "ladder")).transpose()?,
            out: f.out.clone(),
            emit,
            workers: f.workers,
            samples: f.samples,
            depth: f.depth,
            tol: f.tol,
            residual_target: f.residual_target,
            n_max: f.n_max,
        })
    }
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub map: MapDescriptor,
    pub omega: Option<C64>,
    pub pq: Option<(i64, u32)>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub ladder: Vec<f64>,
    pub out: Option<PathBuf>,
    pub emit: Vec<Emit>,
    pub workers: Option<usize>,
    pub samples: Option<usize>,
    pub depth: usize,
    pub tol: f64,
    pub solver: SolverOptions,
}

fn parse_pq(s: &str) -> Result<(i64, u32), String> {
    let (p, q) = s.split_once('/').ok_or_else(|| format!("expected P/Q, got {s:?}"))?;
    let p: i64 = p.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
    let q: u32 = q.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
    if q == 0 || gcd(p, q as i64) != 1 {
        return Err(format!("{p}/{q} is not a reduced fraction"));
    }
    Ok((p, q))
}

fn read_map(source: &MapSource) -> Result<MapDescriptor, String> {
    match source {
        MapSource::Inline(d) => Ok(d.clone()),
        MapSource::Path(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("cannot read map {}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("map {}: {e}", p.display()))
        }
    }
}

impl RunConfig {
    /// Checks the patch and fills defaults for `command`.
    pub fn resolve(command: Command, patch: ConfigPatch) -> Result<Self, String> {
        let map = read_map(patch.map.as_ref().ok_or("a map is required (--map)")?)?;
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(format!("{what} must be positive, got {v}"))
            }
        };
        let tol = positive(patch.tol.unwrap_or(1e-12), "tol")?;
        let defaults = SolverOptions::default();
        let residual_target = positive(patch.residual_target.unwrap_or(defaults.residual_target), "residual_target")?;
        let n_max = patch.n_max.unwrap_or(defaults.n_max);
        if let Some(n) = patch.n {
            if n < MIN_N {
                return Err(format!("N must be at least {MIN_N}, got {n}"));
            }
        }
        if n_max < MIN_N {
            return Err(format!("n_max must be at least {MIN_N}, got {n_max}"));
        }
        if let Some(m) = patch.m {
            let n = patch.n.ok_or("M was given without N")?;
            if m < min_collocation(n) {
                return Err(format!("M must be at least 4N+4 = {}, got {m}", min_collocation(n)));
            }
        }
        let ladder = patch.ladder.unwrap_or_else(default_ladder);
        if ladder.len() < 2 || ladder.iter().any(|y| !(*y > 0.0 && y.is_finite())) {
            return Err("the ladder needs at least two positive heights".into());
        }
        if ladder.windows(2).any(|w| !(w[1] < w[0])) {
            return Err("ladder heights must strictly decrease".into());
        }
        let emit = patch.emit.unwrap_or_else(|| match command {
            Command::Trace | Command::Atlas => command.formats().to_vec(),
            _ => vec![command.formats()[0]],
        });
        if emit.is_empty() {
            return Err("nothing to emit".into());
        }
        if let Some(e) = emit.iter().find(|e| !command.formats().contains(e)) {
            return Err(format!("{} cannot emit {}", command.name(), e.extension()));
        }
        if patch.workers == Some(0) || patch.samples == Some(0) || patch.depth == Some(0) {
            return Err("workers, samples and depth must be at least 1".into());
        }
        let omega = patch.omega.map(|[re, im]| C64::new(re, im));
        if let Some(w) = omega {
            if !(w.re.is_finite() && w.im.is_finite()) {
                return Err("omega must be finite".into());
            }
        }
        let pq = patch.pq.as_deref().map(parse_pq).transpose()?;
        match command {
            Command::Cycles | Command::Sigma if pq.is_none() => return Err(format!("{} needs --pq", command.name())),
            Command::Tau if !omega.is_some_and(|w| w.im > 0.0) => {
                return Err("tau needs --omega RE,IM with IM > 0".into());
            }
            Command::Boundary if !omega.is_some_and(|w| w.im == 0.0) => {
                return Err("boundary needs a real --omega".into());
            }
            _ => {}
        }
        Ok(RunConfig {
            map,
            omega,
            pq,
            n: patch.n,
            m: patch.m,
            ladder,
            out: patch.out,
            emit,
            workers: patch.workers,
            samples: patch.samples,
            depth: patch.depth.unwrap_or(5),
            tol,
            solver: SolverOptions { n_min: defaults.n_min.min(n_max), n_max, residual_target },
        })
    }

    fn trace_options(&self, samples: usize) -> TraceOptions {
        TraceOptions {
            samples: self.samples.unwrap_or(samples),
            rungs: self.ladder.len(),
            y_cap: self.ladder[0],
            solver: self.solver,
            ..TraceOptions::default()
        }
    }
}

/// Failure classes, mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numerical(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numerical(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => CliError::Validation(m),
            other => CliError::Numerical(other),
        }
    }
}

/// Report of `rot`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotReport {
    pub rational: bool,
    pub p: Option<i64>,
    pub q: Option<u32>,
    /// Lifted rotation number (midpoint of the bracket when irrational).
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Report of `boundary`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub omega: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub error_estimate: f64,
    pub max_residual: f64,
}

/// Rendered outputs of one command, in emit order.
pub type Outputs = Vec<(Emit, String)>;

fn pick(cfg: &RunConfig, mut render: impl FnMut(Emit) -> String) -> Outputs {
    cfg.emit.iter().map(|&e| (e, render(e))).collect()
}

/// Runs `command`; the returned texts are not yet written anywhere.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outputs, CliError> {
    let map = CircleMap::from_descriptor(&cfg.map)?;
    let out = match command {
        Command::Rot => {
            let report = match rotation(&map, cfg.tol)? {
                Rotation::Rational { p, q } => {
                    let v = p as f64 / q as f64;
                    RotReport { rational: true, p: Some(p), q: Some(q), value: v, lo: v, hi: v }
                }
                Rotation::Bracket { lo, hi } => {
                    RotReport { rational: false, p: None, q: None, value: 0.5 * (lo + hi), lo, hi }
                }
            };
            pick(cfg, |_| to_json(&report))
        }
        Command::Cycles => {
            let (p, q) = cfg.pq.expect("validated");
            let cycles = find_cycles(&map, p, q)?;
            pick(cfg, |e| match e {
                Emit::Csv => to_csv(&cycle_rows(&cycles), &CYCLE_HEADER),
                _ => to_json(&cycles),
            })
        }
        Command::Tau => {
            let w = cfg.omega.expect("validated");
            let sol = match cfg.n {
                Some(n) => complex_rotation_number(&map, w, n, cfg.m.unwrap_or(min_collocation(n)))?,
                None => solve_adaptive(&map, w, &cfg.solver)?,
            };
            pick(cfg, |e| match e {
                Emit::Csv => to_csv(&[TauRow::from(&sol)], &TAU_HEADER),
                _ => to_json(&TauReport::from(&sol)),
            })
        }
        Command::Boundary => {
            let w = cfg.omega.expect("validated").re;
            let bv = boundary_tau_with(&map, w, &cfg.ladder, &cfg.solver)?;
            let report = BoundaryReport {
                omega: w,
                tau_re: bv.tau.re,
                tau_im: bv.tau.im,
                error_estimate: bv.error_estimate,
                max_residual: bv.samples.iter().map(|s| s.residual).fold(0.0, f64::max),
            };
            pick(cfg, |e| match e {
                Emit::Csv => to_csv(&ladder_rows(&bv), &TAU_HEADER),
                _ => to_json(&report),
            })
        }
        Command::Trace => {
            let (p, q) = cfg.pq.unwrap_or((0, 1));
            let trace = trace_bubble(&map, p, q, &cfg.trace_options(16))?;
            let d_f = total_distortion(&map)?.value;
            pick(cfg, |e| match e {
                Emit::Csv => to_csv(&trace.samples().map(BubbleRow::from).collect::<Vec<_>>(), &BUBBLE_HEADER),
                Emit::Json => to_json(&trace),
                Emit::Svg => render_bubbles(std::slice::from_ref(&trace), d_f, PLOT_DISK_Q),
            })
        }
        Command::Weld => {
            let n = cfg.n.unwrap_or(DEFAULT_WELD_N);
            let sol = welding_constant(&map, n, cfg.m.unwrap_or(min_collocation(n)))?;
            pick(cfg, |_| to_json(&sol.report()))
        }
        Command::Sigma => {
            let (p, q) = cfg.pq.expect("validated");
            let data = sigma(&map, p, q)?;
            pick(cfg, |_| to_json(&data))
        }
        Command::Tsujii => {
            let reports = tsujii_gap(&map, cfg.depth)?;
            pick(cfg, |_| to_json(&reports))
        }
        Command::Atlas => {
            let samples = atlas(&map, &cfg.trace_options(64))?;
            let d_f = total_distortion(&map)?.value;
            pick(cfg, |e| match e {
                Emit::Csv => to_csv(&samples.iter().map(BubbleRow::from).collect::<Vec<_>>(), &BUBBLE_HEADER),
                Emit::Json => to_json(&samples),
                Emit::Svg => render_atlas(&samples, d_f, PLOT_DISK_Q),
            })
        }
    };
    Ok(out)
}

fn write_outputs(command: Command, dir: &Path, outputs: &Outputs) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Validation(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for (emit, text) in outputs {
        std::fs::write(dir.join(format!("{}.{}", command.name(), emit.extension())), text).map_err(io)?;
    }
    Ok(())
}

/// Merges flags with the optional JSON config and validates.
pub fn configure(command: Command, flags: &Flags) -> Result<RunConfig, CliError> {
    let mut patch = ConfigPatch::try_from(flags).map_err(CliError::Validation)?;
    if let Some(path) = &flags.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        let over: ConfigPatch = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))?;
        patch = patch.overridden_by(over);
    }
    RunConfig::resolve(command, patch).map_err(CliError::Validation)
}

/// Runs a parsed command line; returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = configure(cli.command, &cli.flags).and_then(|cfg| {
        let go = || -> Result<(), CliError> {
            let outputs = execute(cli.command, &cfg)?;
            match &cfg.out {
                Some(dir) => write_outputs(cli.command, dir, &outputs),
                None => {
                    print!("{}", outputs[0].1);
                    Ok(())
                }
            }
        };
        match cfg.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::Validation(format!("worker pool: {e}")))?
                .install(go),
            None => go(),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
