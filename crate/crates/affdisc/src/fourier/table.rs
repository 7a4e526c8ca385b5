use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::averages::{direction_breaks, rotation_dilation_avg_sq_many, AvgOptions, Ray};
use super::FourierError;
use crate::geometry::{AngleInterval, ConvexBody};

/// Grid parameters of a [`SpectralWeightTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableSpec {
    pub rho_min: f64,
    pub rho_max: f64,
    pub radii_per_octave: usize,
    /// Largest angular step of the direction mesh.
    pub angle_step: f64,
    /// Smallest angular step next to critical normals, as a multiple of `1/(rho_max·diam)`.
    pub fine_factor: f64,
    pub delta_power: i32,
}

impl TableSpec {
    pub fn new(rho_max: f64) -> Self {
        TableSpec { rho_min: 0.5, rho_max, radii_per_octave: 48, angle_step: 0.01, fine_factor: 0.1, delta_power: 4 }
    }
}

/// `W(ρ, ω) = ∫_I ∫_0^1 |FT_{[δ,θ]C}(ρ u(ω))|² dδ dθ` on a polar grid.
#[derive(Debug, Clone)]
pub struct SpectralWeightTable {
    pub body_hash: u64,
    pub interval: AngleInterval,
    pub spec: TableSpec,
    pub radii: Vec<f64>,
    /// Directions in `[0, π)`; `W` is π-periodic in `ω`.
    pub omegas: Vec<f64>,
    /// `values[k][j] = W(radii[k], omegas[j])`.
    pub values: Vec<Vec<f64>>,
}

/// Direction mesh on `[0, π)` refined toward the critical normals.
fn direction_mesh(body: &ConvexBody, spec: &TableSpec) -> Vec<f64> {
    let mut crit: Vec<f64> = direction_breaks(body, -1e-9, PI - 1e-9).into_iter().map(|c| c.rem_euclid(PI)).collect();
    crit.sort_by(f64::total_cmp);
    crit.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let coarse = spec.angle_step.min(PI / 8.0);
    if crit.is_empty() {
        let n = (PI / coarse).ceil() as usize;
        return (0..n).map(|j| PI * j as f64 / n as f64).collect();
    }
    let (l, _) = body.diameters();
    let fine = (spec.fine_factor / (spec.rho_max * l)).min(coarse);
    let step = |d: f64| (fine + 0.05 * d).clamp(fine, coarse);
    let mut out = Vec::new();
    for i in 0..crit.len() {
        let c0 = crit[i];
        let c1 = if i + 1 < crit.len() { crit[i + 1] } else { crit[0] + PI };
        let mid = 0.5 * (c0 + c1);
        let mut fwd = vec![c0];
        let mut x = c0;
        while x + step(x - c0) < mid {
            x += step(x - c0);
            fwd.push(x);
        }
        let mut bwd = Vec::new();
        let mut y = c1;
        while y - step(c1 - y) > mid {
            y -= step(c1 - y);
            bwd.push(y);
        }
        // the midpoint gap is at most one step on each side
        fwd.push(mid);
        fwd.extend(bwd.into_iter().rev());
        out.extend(fwd);
    }
    let mut out: Vec<f64> = out.into_iter().map(|x| x.rem_euclid(PI)).collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    out
}

/// Cumulative trapezoid integral of a π-periodic piecewise-linear function.
struct Cumulative<'a> {
    phi: &'a [f64],
    d: &'a [f64],
    h: Vec<f64>,
}

impl<'a> Cumulative<'a> {
    fn new(phi: &'a [f64], d: &'a [f64]) -> Self {
        let n = phi.len();
        let mut h = vec![0.0; n + 1];
        for j in 0..n {
            let (x1, y1) = if j + 1 < n { (phi[j + 1], d[j + 1]) } else { (phi[0] + PI, d[0]) };
            h[j + 1] = h[j] + 0.5 * (x1 - phi[j]) * (d[j] + y1);
        }
        Cumulative { phi, d, h }
    }

    /// `∫_{φ_0}^{x} f`, extended periodically.
    fn at(&self, x: f64) -> f64 {
        let n = self.phi.len();
        let turns = ((x - self.phi[0]) / PI).floor();
        let y = x - turns * PI;
        let j = (self.phi.partition_point(|&p| p <= y).max(1) - 1).min(n - 1);
        let (x1, y1) = if j + 1 < n { (self.phi[j + 1], self.d[j + 1]) } else { (self.phi[0] + PI, self.d[0]) };
        let s = y - self.phi[j];
        let slope = (y1 - self.d[j]) / (x1 - self.phi[j]);
        turns * self.h[n] + self.h[j] + s * (self.d[j] + 0.5 * slope * s)
    }
}

/// Worst disagreement between a table and direct quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub count: usize,
    pub worst_rel: f64,
    pub worst_rho: f64,
    pub worst_omega: f64,
}

impl SpectralWeightTable {
    pub fn build(body: &ConvexBody, interval: &AngleInterval, spec: &TableSpec) -> Result<Self, FourierError> {
        if !(spec.rho_max >= 1.0) || !(spec.rho_min > 0.0) || spec.rho_min >= spec.rho_max || spec.radii_per_octave == 0 {
            return Err(FourierError::Argument(format!("bad table grid {spec:?}")));
        }
        let octaves = (spec.rho_max / spec.rho_min).log2();
        let nr = (octaves * spec.radii_per_octave as f64).ceil() as usize + 1;
        let radii: Vec<f64> =
            (0..nr).map(|k| spec.rho_min * (spec.rho_max / spec.rho_min).powf(k as f64 / (nr - 1) as f64)).collect();
        let phi = direction_mesh(body, spec);
        let p = spec.delta_power;
        let rays: Vec<Result<Vec<f64>, FourierError>> = phi
            .par_iter()
            .map(|&th| {
                let ray = Ray::new(body, th)?;
                let m = ray.moments(&radii, p);
                Ok(m.into_iter().zip(&radii).map(|(v, r)| v / r.powi(p + 1)).collect())
            })
            .collect();
        let mut dil = vec![vec![0.0; phi.len()]; nr];
        for (j, r) in rays.into_iter().enumerate() {
            for (k, v) in r?.into_iter().enumerate() {
                dil[k][j] = v;
            }
        }
        let s = interval.start;
        let len = interval.length;
        let mut omegas: Vec<f64> =
            phi.iter().flat_map(|&f| [(f + s).rem_euclid(PI), (f + s + len).rem_euclid(PI)]).collect();
        omegas.sort_by(f64::total_cmp);
        omegas.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let values = dil
            .iter()
            .map(|d| {
                let c = Cumulative::new(&phi, d);
                omegas.iter().map(|&w| (c.at(w - s) - c.at(w - s - len)).max(0.0)).collect()
            })
            .collect();
        Ok(SpectralWeightTable { body_hash: body.content_hash(), interval: *interval, spec: *spec, radii, omegas, values })
    }

    pub fn rho_max(&self) -> f64 {
        *self.radii.last().expect("non-empty grid")
    }

    fn at_radius(&self, k: usize, omega: f64) -> f64 {
        let w = omega.rem_euclid(PI);
        let n = self.omegas.len();
        let j = self.omegas.partition_point(|&o| o <= w);
        let (j0, x0) = if j == 0 { (n - 1, self.omegas[n - 1] - PI) } else { (j - 1, self.omegas[j - 1]) };
        let (j1, x1) = if j == n { (0, self.omegas[0] + PI) } else { (j, self.omegas[j]) };
        let row = &self.values[k];
        if x1 <= x0 {
            return row[j0];
        }
        let t = (w - x0) / (x1 - x0);
        row[j0] + t * (row[j1] - row[j0])
    }

    /// Interpolated weight; linear in `ω`, log-log in `ρ`.
    pub fn weight(&self, rho: f64, omega: f64) -> Result<f64, FourierError> {
        let r_hi = self.rho_max();
        if rho > r_hi * (1.0 + 1e-12) {
            return Err(FourierError::Coverage { required: rho, available: r_hi });
        }
        let k = self.radii.partition_point(|&r| r <= rho).clamp(1, self.radii.len() - 1);
        let (r0, r1) = (self.radii[k - 1], self.radii[k]);
        let (w0, w1) = (self.at_radius(k - 1, omega), self.at_radius(k, omega));
        let t = ((rho.max(r0)).ln() - r0.ln()) / (r1.ln() - r0.ln());
        if w0 > 0.0 && w1 > 0.0 {
            Ok((w0.ln() + t * (w1.ln() - w0.ln())).exp())
        } else {
            Ok(w0 + t * (w1 - w0))
        }
    }

    /// Weight at an integer frequency.
    pub fn weight_at(&self, m: (i64, i64)) -> Result<f64, FourierError> {
        let (x, y) = (m.0 as f64, m.1 as f64);
        self.weight(x.hypot(y), y.atan2(x))
    }

    /// `max ρ³ W(ρ, ω)` over grid radii in `[lo, hi]`.
    pub fn max_rho3_weight(&self, lo: f64, hi: f64) -> f64 {
        let mut best: f64 = 0.0;
        for (k, r) in self.radii.iter().enumerate() {
            if *r >= lo && *r <= hi {
                let m = self.values[k].iter().copied().fold(0.0, f64::max);
                best = best.max(r.powi(3) * m);
            }
        }
        best
    }

    /// Compares the table with direct quadrature at `count` random points.
    pub fn probe(&self, body: &ConvexBody, count: usize, seed: u64) -> Result<ProbeReport, FourierError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = (2.0 * self.spec.rho_min).min(self.rho_max());
        let mut report = ProbeReport { count, worst_rel: 0.0, worst_rho: 0.0, worst_omega: 0.0 };
        let opts = AvgOptions { delta_power: self.spec.delta_power, rel_tol: 1e-5, ..AvgOptions::default() };
        for _ in 0..count {
            let rho = lo * (self.rho_max() / lo).powf(rng.random::<f64>());
            let omega = PI * rng.random::<f64>();
            let window = AngleInterval::new(omega - self.interval.start - self.interval.length, self.interval.length);
            let direct = if self.interval.is_full() {
                2.0 * rotation_dilation_avg_sq_many(body, &AngleInterval::new(0.0, PI), &[rho], &opts)?.value[0]
            } else {
                rotation_dilation_avg_sq_many(body, &window, &[rho], &opts)?.value[0]
            };
            let table = self.weight(rho, omega)?;
            let rel = (table - direct).abs() / direct.abs().max(1e-300);
            if rel > report.worst_rel {
                report = ProbeReport { count, worst_rel: rel, worst_rho: rho, worst_omega: omega };
            }
        }
        Ok(report)
    }

    /// Probes and fails when the worst relative error exceeds `tol`.
    pub fn validate(&self, body: &ConvexBody, count: usize, seed: u64, tol: f64) -> Result<ProbeReport, FourierError> {
        let r = self.probe(body, count, seed)?;
        if r.worst_rel > tol {
            return Err(FourierError::Probe(format!(
                "relative error {:.3e} at rho={}, omega={}",
                r.worst_rel, r.worst_rho, r.worst_omega
            )));
        }
        Ok(r)
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), FourierError> {
        let io = |e: std::io::Error| FourierError::Io(e.to_string());
        let mut f = std::io::BufWriter::new(std::fs::File::create(path).map_err(io)?);
        let s = &self.spec;
        writeln!(f, "# body_hash={:016x}", self.body_hash).map_err(io)?;
        writeln!(f, "# interval_start={:e}", self.interval.start).map_err(io)?;
        writeln!(f, "# interval_length={:e}", self.interval.length).map_err(io)?;
        writeln!(
            f,
            "# grid rho_min={:e} rho_max={:e} radii_per_octave={} angle_step={:e} fine_factor={:e} delta_power={}",
            s.rho_min, s.rho_max, s.radii_per_octave, s.angle_step, s.fine_factor, s.delta_power
        )
        .map_err(io)?;
        let mut w = csv::Writer::from_writer(f);
        w.write_record(["k", "j", "rho", "omega", "W"]).map_err(|e| FourierError::Io(e.to_string()))?;
        for (k, row) in self.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                w.serialize((k, j, self.radii[k], self.omegas[j], v)).map_err(|e| FourierError::Io(e.to_string()))?;
            }
        }
        w.flush().map_err(io)?;
        Ok(())
    }

    pub fn load_csv(path: &Path) -> Result<Self, FourierError> {
        let bad = |m: &str| FourierError::Io(format!("{}: {m}", path.display()));
        let file = std::fs::File::open(path).map_err(|e| bad(&e.to_string()))?;
        let mut header = std::collections::HashMap::new();
        for line in std::io::BufReader::new(&file).lines() {
            let line = line.map_err(|e| bad(&e.to_string()))?;
            let Some(rest) = line.strip_prefix('#') else { break };
            for kv in rest.split_whitespace() {
                if let Some((k, v)) = kv.split_once('=') {
                    header.insert(k.to_string(), v.to_string());
                }
            }
        }
        let get = |k: &str| header.get(k).ok_or_else(|| bad(&format!("missing header key {k}")));
        let num = |k: &str| -> Result<f64, FourierError> { get(k)?.parse().map_err(|_| bad(&format!("bad value for {k}"))) };
        let body_hash = u64::from_str_radix(get("body_hash")?, 16).map_err(|_| bad("bad body hash"))?;
        let spec = TableSpec {
            rho_min: num("rho_min")?,
            rho_max: num("rho_max")?,
            radii_per_octave: num("radii_per_octave")? as usize,
            angle_step: num("angle_step")?,
            fine_factor: num("fine_factor")?,
            delta_power: num("delta_power")? as i32,
        };
        let interval = AngleInterval { start: num("interval_start")?, length: num("interval_length")? };
        let file = std::fs::File::open(path).map_err(|e| bad(&e.to_string()))?;
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file);
        let mut radii: Vec<f64> = Vec::new();
        let mut omegas: Vec<f64> = Vec::new();
        let mut values: Vec<Vec<f64>> = Vec::new();
        for rec in rdr.deserialize() {
            let (k, j, rho, omega, w): (usize, usize, f64, f64, f64) = rec.map_err(|e| bad(&e.to_string()))?;
            if k == radii.len() {
                radii.push(rho);
                values.push(Vec::new());
            }
            if k == 0 && j == omegas.len() {
                omegas.push(omega);
            }
            if k + 1 != radii.len() || j != values[k].len() {
                return Err(bad("rows out of order"));
            }
            values[k].push(w);
        }
        if radii.is_empty() || values.iter().any(|r| r.len() != omegas.len()) {
            return Err(bad("incomplete grid"));
        }
        Ok(SpectralWeightTable { body_hash, interval, spec, radii, omegas, values })
    }
}
