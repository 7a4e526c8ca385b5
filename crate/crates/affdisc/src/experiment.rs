//! Drivers behind the `affdisc` command-line tool: flat configuration,
//! scans over ρ, λ and N, and log-log slope fits.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bodies::{self, IntermediateBodySpec};
use crate::discrepancy::{self, d2_montecarlo, d2_parseval, truncation_radius, PointSet};
use crate::fourier::{self, AvgOptions, FourierError, SpectralWeightTable, TableSpec};
use crate::geometry::{AngleInterval, ConvexBody, Vec2};
use crate::pointsets::{self, AnisotropicLatticeSpec, RotatedLatticeSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ExperimentError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Io(_) => 2,
            ExperimentError::Numerical(_) => 3,
        }
    }
}

fn cfg_err(m: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(m.into())
}

/// Flat experiment configuration. Every key can be given in a TOML file
/// or as a command-line flag of the same name; flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Experiment kind; must match the subcommand when given
    #[arg(long)]
    pub kind: Option<String>,
    /// disc | square | hexagon | polygon:N | rect:WxH | C:PHI:ALPHA | H:PHI:ALPHA | path to a JSON body
    #[arg(long)]
    pub body: Option<String>,
    /// Start of the rotation interval I [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub interval_start: Option<f64>,
    /// Length of I [default: 2π]
    #[arg(long)]
    pub interval_length: Option<f64>,
    /// fourier-decay average: rotation | spherical | ray [default: rotation]
    #[arg(long)]
    pub mode: Option<String>,
    /// Ray direction for mode=ray [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Smallest radius of the ρ schedule [default: 8]
    #[arg(long)]
    pub rho_min: Option<f64>,
    /// Largest radius of the ρ schedule [default: 256]
    #[arg(long)]
    pub rho_max: Option<f64>,
    /// Number of points in a geometric schedule [default: 16 for ρ, 8 for λ, 6 for N]
    #[arg(long)]
    pub count: Option<usize>,
    /// Largest depth of the λ schedule [default: 0.1]
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Smallest depth of the λ schedule [default: 1e-4]
    #[arg(long)]
    pub lambda_min: Option<f64>,
    /// Point family: square | rotated | aniso | compose [default: square]
    #[arg(long)]
    pub family: Option<String>,
    /// Family parameter for `points`
    #[arg(long)]
    pub n: Option<u64>,
    /// Explicit N schedule (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<u64>>,
    /// Smallest N of a geometric schedule
    #[arg(long)]
    pub n_min: Option<u64>,
    /// Largest N of a geometric schedule
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Rotation numerator for rotated lattices [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub q1: Option<i64>,
    /// Rotation denominator for rotated lattices [default: 2]
    #[arg(long, allow_hyphen_values = true)]
    pub q2: Option<i64>,
    /// Anisotropy exponent for aniso lattices [default: 2]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Relative quadrature tolerance [default: 1e-6]
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Power p in the dilation average ∫ δ^p |FT(δξ)|² dδ [default: 4]
    #[arg(long)]
    pub delta_power: Option<i32>,
    /// Truncation radius as a multiple of the point set's frequency scale [default: 8]
    #[arg(long)]
    pub truncation_multiple: Option<f64>,
    /// Coarse angular step of weight tables [default: 0.01]
    #[arg(long)]
    pub angle_step: Option<f64>,
    /// Radii per octave of weight tables [default: 48]
    #[arg(long)]
    pub radii_per_octave: Option<usize>,
    /// Seed for Monte-Carlo estimates [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo samples for the cross-check on the two largest N; 0 disables [default: 10000]
    #[arg(long)]
    pub mc_samples: Option<usize>,
    /// Directory for cached weight tables
    #[arg(long)]
    pub weights_cache: Option<PathBuf>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv | json [default: csv]
    #[arg(long)]
    pub format: Option<String>,
    /// Secondary decay exponent in [0, 1]; labels the expected discrepancy exponent 2/(4+h)
    #[arg(long)]
    pub h: Option<f64>,
    /// Expected value for --assert (slope, exponent or semichord gap bound)
    #[arg(long, allow_hyphen_values = true)]
    pub expect: Option<f64>,
    /// Tolerance for --assert
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Input CSV for exponent-fit
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// x column for exponent-fit [default: n]
    #[arg(long)]
    pub x_col: Option<String>,
    /// y column for exponent-fit [default: d2]
    #[arg(long)]
    pub y_col: Option<String>,
}

macro_rules! merge_fields {
    ($base:ident, $over:ident, $($f:ident),*) => {
        ExperimentConfig { $($f: $over.$f.or($base.$f)),* }
    };
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ExperimentError> {
        toml::from_str(text).map_err(|e| cfg_err(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| cfg_err(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Keys set in `over` replace those in `self`.
    pub fn merged(self, over: ExperimentConfig) -> ExperimentConfig {
        let base = self;
        merge_fields!(
            base, over, kind, body, interval_start, interval_length, mode, theta, rho_min, rho_max, count,
            lambda_max, lambda_min, family, n, ns, n_min, n_max, q1, q2, alpha, rel_tol, delta_power,
            truncation_multiple, angle_step, radii_per_octave, seed, mc_samples, weights_cache, output, format, h,
            expect, tolerance, input, x_col, y_col
        )
    }

    pub fn interval(&self) -> Result<AngleInterval, ExperimentError> {
        let len = self.interval_length.unwrap_or(TAU);
        let start = self.interval_start.unwrap_or(0.0);
        if !(0.0..=TAU).contains(&len) || !start.is_finite() {
            return Err(cfg_err(format!("interval length must lie in [0, 2π], got {len}")));
        }
        Ok(AngleInterval::new(start, len))
    }

    pub fn body(&self) -> Result<ConvexBody, ExperimentError> {
        parse_body(self.body.as_deref().ok_or_else(|| cfg_err("missing body"))?)
    }

    fn rel_tol(&self) -> Result<f64, ExperimentError> {
        positive("rel_tol", self.rel_tol.unwrap_or(1e-6))
    }

    fn check_kind(&self, kind: &str) -> Result<(), ExperimentError> {
        match &self.kind {
            Some(k) if k != kind => Err(cfg_err(format!("config is for {k}, not {kind}"))),
            _ => Ok(()),
        }
    }

    pub fn wants_json(&self) -> Result<bool, ExperimentError> {
        match self.format.as_deref().unwrap_or("csv") {
            "csv" => Ok(false),
            "json" => Ok(true),
            f => Err(cfg_err(format!("unknown format {f}"))),
        }
    }

    fn table_spec(&self, rho_max: f64) -> Result<TableSpec, ExperimentError> {
        let mut s = TableSpec::new(rho_max);
        s.angle_step = positive("angle_step", self.angle_step.unwrap_or(s.angle_step))?;
        s.radii_per_octave = self.radii_per_octave.unwrap_or(s.radii_per_octave).max(1);
        s.delta_power = self.delta_power.unwrap_or(s.delta_power);
        Ok(s)
    }
}

fn positive(name: &str, v: f64) -> Result<f64, ExperimentError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(cfg_err(format!("{name} must be positive, got {v}")))
    }
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, ExperimentError> {
    s.parse().map_err(|_| cfg_err(format!("bad {what} '{s}'")))
}

/// Parses a body description; see [`ExperimentConfig::body`].
pub fn parse_body(spec: &str) -> Result<ConvexBody, ExperimentError> {
    let geo = |e: crate::geometry::BodyError| cfg_err(e.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["disc"] => Ok(bodies::disc(Vec2::ZERO, 1.0)),
        ["square"] => Ok(bodies::rectangle(1.0, 1.0)),
        ["hexagon"] => bodies::regular_polygon(6, 1.0).map_err(geo),
        ["polygon", n] => bodies::regular_polygon(num(n, "side count")?, 1.0).map_err(geo),
        ["rect", wh] => {
            let (w, h) = wh.split_once('x').ok_or_else(|| cfg_err(format!("expected rect:WxH, got {spec}")))?;
            let (w, h): (f64, f64) = (num(w, "width")?, num(h, "height")?);
            if !(w > 0.0 && h > 0.0) {
                return Err(cfg_err("rectangle sides must be positive"));
            }
            Ok(bodies::rectangle(w, h))
        }
        [k @ ("C" | "H"), phi, alpha] => {
            let s = IntermediateBodySpec::new(num(phi, "phi")?, num(alpha, "alpha")?);
            if *k == "C" { bodies::make_c(&s) } else { bodies::make_h(&s) }.map_err(geo)
        }
        _ if spec.ends_with(".json") => {
            let text = std::fs::read_to_string(spec).map_err(|e| cfg_err(format!("{spec}: {e}")))?;
            ConvexBody::from_json(&text).map_err(geo)
        }
        _ => Err(cfg_err(format!("unknown body '{spec}'"))),
    }
}

/// `count` points from `a` to `b`, equally spaced in log scale.
pub fn geometric_schedule(a: f64, b: f64, count: usize) -> Result<Vec<f64>, ExperimentError> {
    if !(a > 0.0 && b > a) || count < 2 {
        return Err(cfg_err(format!("schedule needs 0 < start < end and ≥ 2 points, got {a}..{b} x{count}")));
    }
    Ok((0..count).map(|k| a * (b / a).powf(k as f64 / (count - 1) as f64)).collect())
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> =
        xs.iter().zip(ys).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len();
    if n < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = if n > 2 { (sse / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };
    Some(Fit { slope, intercept, stderr, points: n })
}

/// Fits over the whole schedule and over its upper half.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub full: Option<Fit>,
    pub upper: Option<Fit>,
}

pub fn fit_report(xs: &[f64], ys: &[f64]) -> FitReport {
    let h = xs.len() / 2;
    FitReport { full: fit_loglog(xs, ys), upper: fit_loglog(&xs[h..], &ys[h..]) }
}

/// Outcome of an `--assert` gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gate {
    pub measured: f64,
    pub expect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn slope_gate(fit: &FitReport, expect: Option<f64>, tolerance: Option<f64>) -> Result<Gate, ExperimentError> {
    let expect = expect.ok_or_else(|| cfg_err("--assert needs an expected value"))?;
    let tolerance = tolerance.ok_or_else(|| cfg_err("--assert needs a tolerance"))?;
    let measured = fit.upper.map(|f| f.slope).unwrap_or(f64::NAN);
    Ok(Gate { measured, expect, tolerance, pass: (measured - expect).abs() <= tolerance })
}

fn write_csv<S: Serialize>(header: Option<&[&str]>, rows: &[S]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(header.is_none()).from_writer(Vec::new());
    if let Some(h) = header {
        w.write_record(h).expect("in-memory write");
    }
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8")
}

// ---------------------------------------------------------------- body-info

#[derive(Debug, Clone, Serialize)]
pub struct AngularPointInfo {
    pub arclength: f64,
    pub normal_start: f64,
    pub normal_length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BodyInfo {
    pub schema: u32,
    pub kind: String,
    pub perimeter: f64,
    pub area: f64,
    pub centroid: [f64; 2],
    pub diameter_l: f64,
    pub diameter_s: f64,
    pub angular_points: Vec<AngularPointInfo>,
    pub trace_components: Vec<[f64; 2]>,
    pub psi: f64,
}

pub fn body_info(body: &ConvexBody) -> BodyInfo {
    let (l, s) = body.diameters();
    let trace = body.angular_trace();
    BodyInfo {
        schema: SCHEMA_VERSION,
        kind: format!("{:?}", body.kind()).to_lowercase(),
        perimeter: body.perimeter(),
        area: body.area(),
        centroid: body.centroid().into(),
        diameter_l: l,
        diameter_s: s,
        angular_points: body
            .angular_points()
            .into_iter()
            .map(|(s, i)| AngularPointInfo { arclength: s, normal_start: i.start, normal_length: i.length })
            .collect(),
        trace_components: trace.components.iter().map(|c| [c.start, c.length]).collect(),
        psi: trace.psi,
    }
}

// ------------------------------------------------------------------- points

/// Directions `ω − θ`, `θ ∈ I`, lie inside `T_C ∩ (T_C + π)` for `ω = arctan(q1/q2)`.
pub fn rotation_in_flat_sector(body: &ConvexBody, interval: &AngleInterval, q1: i64, q2: i64) -> bool {
    let omega = (q1 as f64).atan2(q2 as f64);
    let arc = AngleInterval::new(omega - interval.start - interval.length, interval.length);
    let comps = body.angular_trace().components;
    comps.iter().any(|a| {
        comps.iter().any(|b| {
            a.intersect(&b.shifted(PI)).iter().any(|c| {
                let off = (arc.start - c.start).rem_euclid(TAU);
                off > 0.0 && off + arc.length < c.length
            })
        })
    })
}

fn build_family(cfg: &ExperimentConfig, n: u64) -> Result<PointSet, ExperimentError> {
    let pe = |e: discrepancy::PointSetError| cfg_err(e.to_string());
    let (q1, q2) = (cfg.q1.unwrap_or(1), cfg.q2.unwrap_or(2));
    let alpha = cfg.alpha.unwrap_or(2.0);
    match cfg.family.as_deref().unwrap_or("square") {
        "square" => pointsets::square_lattice(((n as f64).sqrt() + 1e-9).floor().max(1.0) as u64).map_err(pe),
        "rotated" => pointsets::rotated_lattice(&RotatedLatticeSpec::new(n, q1, q2).map_err(pe)?).map_err(pe),
        "aniso" => pointsets::anisotropic_lattice(&AnisotropicLatticeSpec::new(n, alpha).map_err(pe)?).map_err(pe),
        "compose" => {
            let c = if cfg.alpha.is_some() {
                let exps = AnisotropicLatticeSpec::exponents(alpha);
                pointsets::compose_general_n(n, exps, 4, |k| {
                    pointsets::anisotropic_lattice(&AnisotropicLatticeSpec::new(k, alpha)?)
                })
            } else {
                let spec = RotatedLatticeSpec::new(1, q1, q2).map_err(pe)?;
                pointsets::compose_general_n(n, (0.6, 0.4), 4, |k| {
                    pointsets::rotated_lattice(&RotatedLatticeSpec { n: k, ..spec })
                })
            };
            Ok(c.map_err(pe)?.set)
        }
        f => Err(cfg_err(format!("unknown family {f}"))),
    }
}

/// Point set of the configured family; `n` is the family parameter
/// (the total count for `compose`, `k²` for `square`).
pub fn make_points(cfg: &ExperimentConfig) -> Result<PointSet, ExperimentError> {
    cfg.check_kind("points")?;
    let n = cfg.n.ok_or_else(|| cfg_err("missing n"))?;
    if n == 0 {
        return Err(cfg_err("n must be positive"));
    }
    build_family(cfg, n)
}

// ------------------------------------------------------------ fourier-decay

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    pub rho: f64,
    pub value: f64,
    pub error: f64,
    pub wall_time: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub schema: u32,
    pub mode: String,
    pub body: String,
    pub interval: [f64; 2],
    pub theta: Option<f64>,
    pub rows: Vec<DecayRow>,
    pub fit: FitReport,
    pub expected_slope: Option<f64>,
    pub gate: Option<Gate>,
}

impl DecayReport {
    pub fn to_csv(&self) -> String {
        write_csv(None, &self.rows)
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }
}

fn decay_values(
    body: &ConvexBody,
    mode: &str,
    cfg: &ExperimentConfig,
    rhos: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), FourierError> {
    let opts = AvgOptions { delta_power: cfg.delta_power.unwrap_or(4), rel_tol: cfg.rel_tol.unwrap_or(1e-6), ..AvgOptions::default() };
    let interval = cfg.interval().map_err(|e| FourierError::Argument(e.to_string()))?;
    match mode {
        "rotation" => {
            let r = fourier::rotation_dilation_avg_sq_many(body, &interval, rhos, &opts)?;
            Ok((r.value, r.error))
        }
        "ray" => {
            let v = fourier::dilation_avg_sq_many(body, cfg.theta.unwrap_or(0.0), rhos, opts.delta_power)?;
            Ok((v, vec![0.0; rhos.len()]))
        }
        _ => {
            let v = rhos
                .iter()
                .map(|&r| fourier::spherical_avg_sq_with(body, &interval, r, &opts))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((v, vec![0.0; rhos.len()]))
        }
    }
}

pub fn fourier_decay(cfg: &ExperimentConfig, gate: bool) -> Result<DecayReport, ExperimentError> {
    cfg.check_kind("fourier-decay")?;
    let body = cfg.body()?;
    let mode = cfg.mode.clone().unwrap_or_else(|| "rotation".into());
    if !["rotation", "spherical", "ray"].contains(&mode.as_str()) {
        return Err(cfg_err(format!("unknown mode {mode}")));
    }
    cfg.rel_tol()?;
    let interval = cfg.interval()?;
    let rhos = geometric_schedule(cfg.rho_min.unwrap_or(8.0), cfg.rho_max.unwrap_or(256.0), cfg.count.unwrap_or(16))?;
    let t0 = Instant::now();
    let rows: Vec<DecayRow> = match decay_values(&body, &mode, cfg, &rhos) {
        Ok((v, e)) => {
            let per = t0.elapsed().as_secs_f64() / rhos.len() as f64;
            rhos.iter()
                .zip(v.iter().zip(&e))
                .map(|(&rho, (&value, &error))| DecayRow { rho, value, error, wall_time: per, failure: None })
                .collect()
        }
        // isolate the failing radii
        Err(_) => rhos
            .par_iter()
            .map(|&rho| {
                let t = Instant::now();
                match decay_values(&body, &mode, cfg, &[rho]) {
                    Ok((v, e)) => {
                        DecayRow { rho, value: v[0], error: e[0], wall_time: t.elapsed().as_secs_f64(), failure: None }
                    }
                    Err(err) => DecayRow {
                        rho,
                        value: f64::NAN,
                        error: f64::NAN,
                        wall_time: t.elapsed().as_secs_f64(),
                        failure: Some(err.to_string()),
                    },
                }
            })
            .collect(),
    };
    let ok: Vec<&DecayRow> = rows.iter().filter(|r| r.failure.is_none()).collect();
    let fit = fit_report(&ok.iter().map(|r| r.rho).collect::<Vec<_>>(), &ok.iter().map(|r| r.value).collect::<Vec<_>>());
    let expected_slope = cfg.expect.or(cfg.h.map(|h| -3.0 - h));
    let gate = if gate { Some(slope_gate(&fit, expected_slope, cfg.tolerance)?) } else { None };
    Ok(DecayReport {
        schema: SCHEMA_VERSION,
        body: cfg.body.clone().unwrap_or_default(),
        interval: [interval.start, interval.length],
        theta: (mode == "ray").then(|| cfg.theta.unwrap_or(0.0)),
        mode,
        rows,
        fit,
        expected_slope,
        gate,
    })
}

// ---------------------------------------------------------------- semichord

#[derive(Debug, Clone, Serialize)]
pub struct SemichordRow {
    pub lambda: f64,
    pub average: f64,
    pub target: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemichordReport {
    pub schema: u32,
    pub body: String,
    pub interval: [f64; 2],
    pub target: f64,
    pub rows: Vec<SemichordRow>,
    pub final_gap: f64,
    pub gate: Option<Gate>,
}

impl SemichordReport {
    pub fn to_csv(&self) -> String {
        write_csv(None, &self.rows)
    }
}

pub fn semichord(cfg: &ExperimentConfig, gate: bool) -> Result<SemichordReport, ExperimentError> {
    cfg.check_kind("semichord")?;
    let body = cfg.body()?;
    let interval = cfg.interval()?;
    let hi = cfg.lambda_max.unwrap_or(0.1);
    let lo = cfg.lambda_min.unwrap_or(1e-4);
    let lambdas: Vec<f64> = geometric_schedule(lo, hi, cfg.count.unwrap_or(8))?.into_iter().rev().collect();
    let target = body.portion_of_perimeter(&interval);
    let rows = lambdas
        .par_iter()
        .map(|&lambda| {
            let r = body.semichord_average(&interval, lambda).map_err(|e| ExperimentError::Numerical(e.to_string()))?;
            let gap = if target > 0.0 { (r.value - target).abs() / target } else { r.value.abs() };
            Ok(SemichordRow { lambda, average: r.value, target, gap })
        })
        .collect::<Result<Vec<_>, ExperimentError>>()?;
    let final_gap = rows.last().map(|r| r.gap).unwrap_or(f64::NAN);
    let gate = if gate {
        let tolerance = cfg.tolerance.ok_or_else(|| cfg_err("--assert needs a tolerance"))?;
        Some(Gate { measured: final_gap, expect: 0.0, tolerance, pass: final_gap <= tolerance })
    } else {
        None
    };
    Ok(SemichordReport {
        schema: SCHEMA_VERSION,
        body: cfg.body.clone().unwrap_or_default(),
        interval: [interval.start, interval.length],
        target,
        rows,
        final_gap,
        gate,
    })
}

// -------------------------------------------------------- discrepancy-scan

fn cache_name(body: &ConvexBody, interval: &AngleInterval, spec: &TableSpec) -> String {
    format!(
        "weights-{:016x}-{:.9}-{:.9}-{}-{}-{}-{}.csv",
        body.content_hash(),
        interval.start,
        interval.length,
        spec.angle_step,
        spec.fine_factor,
        spec.radii_per_octave,
        spec.delta_power
    )
}

/// Loads a cached table covering `spec.rho_max`, or builds and stores one.
pub fn load_or_build_table(
    body: &ConvexBody,
    interval: &AngleInterval,
    spec: &TableSpec,
    cache: Option<&Path>,
) -> Result<SpectralWeightTable, FourierError> {
    let path = cache.map(|d| d.join(cache_name(body, interval, spec)));
    if let Some(p) = path.as_deref().filter(|p| p.exists()) {
        if let Ok(t) = SpectralWeightTable::load_csv(p) {
            let same = TableSpec { rho_max: spec.rho_max, ..t.spec } == *spec;
            if same && t.body_hash == body.content_hash() && t.rho_max() >= spec.rho_max {
                return Ok(t);
            }
        }
    }
    let t = SpectralWeightTable::build(body, interval, spec)?;
    if let Some(p) = path {
        if let Some(dir) = p.parent() {
            std::fs::create_dir_all(dir).map_err(|e| FourierError::Io(e.to_string()))?;
        }
        t.save_csv(&p)?;
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub param: u64,
    pub n: usize,
    pub d2: f64,
    pub tail: f64,
    pub r: f64,
    pub frequencies: usize,
    pub mc_value: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub wall_time: f64,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub schema: u32,
    pub body: String,
    pub family: String,
    pub interval: [f64; 2],
    pub truncation_multiple: f64,
    pub rows: Vec<ScanRow>,
    pub fit: FitReport,
    pub expected_exponent: Option<f64>,
    pub gate: Option<Gate>,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        write_csv(None, &self.rows)
    }

    pub fn failed_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.failure.is_some()).count()
    }
}

fn n_schedule(cfg: &ExperimentConfig) -> Result<Vec<u64>, ExperimentError> {
    let ns = match (&cfg.ns, cfg.n_min, cfg.n_max) {
        (Some(ns), _, _) => ns.clone(),
        (None, Some(a), Some(b)) => {
            let mut v: Vec<u64> = geometric_schedule(a as f64, b as f64, cfg.count.unwrap_or(6))?
                .into_iter()
                .map(|x| x.round() as u64)
                .collect();
            v.dedup();
            v
        }
        _ => return Err(cfg_err("give ns or n_min and n_max")),
    };
    if ns.is_empty() || ns[0] == 0 || ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(cfg_err("N schedule must be nonempty, positive and increasing"));
    }
    Ok(ns)
}

pub fn discrepancy_scan(cfg: &ExperimentConfig, gate: bool) -> Result<ScanReport, ExperimentError> {
    cfg.check_kind("discrepancy-scan")?;
    let body = discrepancy::normalize_for_torus(&cfg.body()?);
    let interval = cfg.interval()?;
    let family = cfg.family.clone().unwrap_or_else(|| "square".into());
    if family == "rotated" {
        let (q1, q2) = (cfg.q1.unwrap_or(1), cfg.q2.unwrap_or(2));
        if !rotation_in_flat_sector(&body, &interval, q1, q2) {
            return Err(cfg_err(format!(
                "arctan({q1}/{q2}) puts the directions ω − I outside the corner sectors of this body"
            )));
        }
    }
    let m = positive("truncation_multiple", cfg.truncation_multiple.unwrap_or(8.0))?;
    let ns = n_schedule(cfg)?;
    let sets = ns.iter().map(|&n| build_family(cfg, n)).collect::<Result<Vec<_>, _>>()?;
    let radii: Vec<f64> = sets.iter().map(|p| truncation_radius(p, m)).collect();
    let rho_max = radii.iter().copied().fold(0.0, f64::max) * (1.0 + 1e-9);
    let spec = cfg.table_spec(rho_max)?;
    let table = load_or_build_table(&body, &interval, &spec, cfg.weights_cache.as_deref())
        .map_err(|e| ExperimentError::Numerical(e.to_string()))?;
    let samples = cfg.mc_samples.unwrap_or(10_000);
    let seed = cfg.seed.unwrap_or(1);
    let k = sets.len();
    let rows: Vec<ScanRow> = sets
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let t = Instant::now();
            let mut row = ScanRow {
                param: ns[i],
                n: p.len(),
                d2: f64::NAN,
                tail: f64::NAN,
                r: radii[i],
                frequencies: 0,
                mc_value: None,
                mc_stderr: None,
                wall_time: 0.0,
                failure: None,
            };
            match d2_parseval(p, &body, &interval, radii[i], &table) {
                Ok(d) => {
                    row.d2 = d.value;
                    row.tail = d.tail;
                    row.frequencies = d.frequencies.unwrap_or(0);
                }
                Err(e) => row.failure = Some(e.to_string()),
            }
            if samples > 0 && i + 2 >= k {
                match d2_montecarlo(p, &body, &interval, samples.max(2), seed) {
                    Ok(d) => {
                        row.mc_value = Some(d.value);
                        row.mc_stderr = d.stderr;
                    }
                    Err(e) => row.failure = Some(e.to_string()),
                }
            }
            row.wall_time = t.elapsed().as_secs_f64();
            row
        })
        .collect();
    let ok: Vec<&ScanRow> = rows.iter().filter(|r| r.failure.is_none()).collect();
    let fit = fit_report(&ok.iter().map(|r| r.n as f64).collect::<Vec<_>>(), &ok.iter().map(|r| r.d2).collect::<Vec<_>>());
    let expected_exponent = cfg.expect.or(cfg.h.map(|h| 2.0 / (4.0 + h)));
    let gate = if gate { Some(slope_gate(&fit, expected_exponent, cfg.tolerance)?) } else { None };
    Ok(ScanReport {
        schema: SCHEMA_VERSION,
        body: cfg.body.clone().unwrap_or_default(),
        family,
        interval: [interval.start, interval.length],
        truncation_multiple: m,
        rows,
        fit,
        expected_exponent,
        gate,
    })
}

// ------------------------------------------------------------ exponent-fit

#[derive(Debug, Clone, Serialize)]
pub struct ExponentFitReport {
    pub schema: u32,
    pub input: String,
    pub x_col: String,
    pub y_col: String,
    pub fit: FitReport,
    pub gate: Option<Gate>,
}

pub fn exponent_fit(cfg: &ExperimentConfig, gate: bool) -> Result<ExponentFitReport, ExperimentError> {
    cfg.check_kind("exponent-fit")?;
    let input = cfg.input.as_ref().ok_or_else(|| cfg_err("missing input"))?;
    let x_col = cfg.x_col.clone().unwrap_or_else(|| "n".into());
    let y_col = cfg.y_col.clone().unwrap_or_else(|| "d2".into());
    let io = |e: csv::Error| ExperimentError::Io(format!("{}: {e}", input.display()));
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(input).map_err(io)?;
    let headers = rdr.headers().map_err(io)?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| cfg_err(format!("no column {name}")));
    let (ix, iy) = (col(&x_col)?, col(&y_col)?);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec.map_err(io)?;
        let (Ok(x), Ok(y)) = (rec[ix].parse::<f64>(), rec[iy].parse::<f64>()) else { continue };
        if x.is_finite() && y.is_finite() {
            xs.push(x);
            ys.push(y);
        }
    }
    let fit = fit_report(&xs, &ys);
    if fit.full.is_none() {
        return Err(ExperimentError::Numerical("fewer than two usable rows".into()));
    }
    let gate = if gate { Some(slope_gate(&fit, cfg.expect.or(cfg.h.map(|h| 2.0 / (4.0 + h))), cfg.tolerance)?) } else { None };
    Ok(ExponentFitReport { schema: SCHEMA_VERSION, input: input.display().to_string(), x_col, y_col, fit, gate })
}
