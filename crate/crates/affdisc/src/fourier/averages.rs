use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::polygon::ft_polygon;
use super::profile::Profile;
use super::FourierError;
use crate::geometry::{AngleInterval, ConvexBody, Vec2};
use crate::quad::{self, KahanSum};

/// Evaluates the transform along the ray `{r u(θ) : r ≥ 0}`.
#[derive(Debug, Clone)]
pub enum Ray {
    Polygon { vertices: Vec<Vec2>, area: f64, centroid: Vec2, u: Vec2, width: f64 },
    Profile(Profile),
}

impl Ray {
    pub fn new(body: &ConvexBody, theta: f64) -> Result<Ray, FourierError> {
        if body.is_polygon() {
            Ok(Ray::Polygon {
                vertices: body.vertices().to_vec(),
                area: body.area(),
                centroid: body.centroid(),
                u: Vec2::unit(theta),
                width: body.width(theta),
            })
        } else {
            Ok(Ray::Profile(Profile::new(body, theta)?))
        }
    }

    pub fn ft(&self, r: f64) -> Complex64 {
        match self {
            Ray::Polygon { vertices, area, centroid, u, .. } => ft_polygon(vertices, *area, *centroid, *u * r),
            Ray::Profile(p) => p.ft(r),
        }
    }

    pub fn width(&self) -> f64 {
        match self {
            Ray::Polygon { width, .. } => *width,
            Ray::Profile(p) => p.width(),
        }
    }

    /// `∫_0^{r_k} t^p |FT(t u)|² dt` for each radius of the increasing list `radii`.
    pub fn moments(&self, radii: &[f64], power: i32) -> Vec<f64> {
        static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
        let (x, w) = GL.get_or_init(|| quad::gauss_legendre(8));
        // |FT|² has exponential type 2π·width, so this panel holds half a period
        let step = 0.5 / self.width();
        let mut out = Vec::with_capacity(radii.len());
        let mut acc = KahanSum::default();
        let mut prev = 0.0;
        for &r in radii {
            let r = r.max(prev);
            let n = ((r - prev) / step).ceil().max(1.0) as usize;
            let h = (r - prev) / n as f64;
            for i in 0..n {
                let c = prev + (i as f64 + 0.5) * h;
                let mut s = 0.0;
                for (xi, wi) in x.iter().zip(w) {
                    let t = c + 0.5 * h * xi;
                    s += wi * t.powi(power) * self.ft(t).norm_sqr();
                }
                acc.add(0.5 * h * s);
            }
            out.push(acc.value());
            prev = r;
        }
        out
    }
}

/// Options shared by the averaging routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AvgOptions {
    /// Power of `δ` in the dilation integral; 4 matches `|FT_{δC}(ξ)|² = δ⁴|FT_C(δξ)|²`.
    pub delta_power: i32,
    pub rel_tol: f64,
    pub max_segments: usize,
}

impl Default for AvgOptions {
    fn default() -> Self {
        AvgOptions { delta_power: 4, rel_tol: 1e-6, max_segments: 2000 }
    }
}

/// `∫_0^1 δ^p |FT_C(δρ u(θ))|² dδ` at each (increasing) `ρ`.
pub fn dilation_avg_sq_many(body: &ConvexBody, theta: f64, rhos: &[f64], delta_power: i32) -> Result<Vec<f64>, FourierError> {
    check_radii(rhos)?;
    let ray = Ray::new(body, theta)?;
    Ok(scale_moments(ray.moments(rhos, delta_power), rhos, delta_power))
}

fn scale_moments(m: Vec<f64>, rhos: &[f64], p: i32) -> Vec<f64> {
    m.into_iter().zip(rhos).map(|(v, r)| v / r.powi(p + 1)).collect()
}

fn check_radii(rhos: &[f64]) -> Result<(), FourierError> {
    if rhos.iter().any(|r| !(*r > 0.0 && r.is_finite())) || rhos.windows(2).any(|w| w[1] < w[0]) {
        return Err(FourierError::Argument("radii must be positive and increasing".into()));
    }
    Ok(())
}

pub fn dilation_avg_sq(body: &ConvexBody, theta: f64, rho: f64) -> Result<f64, FourierError> {
    Ok(dilation_avg_sq_many(body, theta, &[rho], 4)?[0])
}

/// Breakpoints for direction integrals over `[a, b]`: critical normals and their antipodes.
pub(crate) fn direction_breaks(body: &ConvexBody, a: f64, b: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for c in body.critical_normals() {
        let c = c.rem_euclid(PI);
        let mut k = ((a - c) / PI).floor();
        loop {
            let x = c + k * PI;
            if x >= b {
                break;
            }
            if x > a {
                out.push(x);
            }
            k += 1.0;
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Value and error estimate of an averaged quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Averaged {
    pub value: Vec<f64>,
    pub error: Vec<f64>,
}

/// `∫_I ∫_0^1 δ^p |FT_C(δρ u(θ))|² dδ dθ` at every `ρ` of an increasing schedule.
pub fn rotation_dilation_avg_sq_many(
    body: &ConvexBody,
    interval: &AngleInterval,
    rhos: &[f64],
    opts: &AvgOptions,
) -> Result<Averaged, FourierError> {
    check_radii(rhos)?;
    if interval.length <= 0.0 {
        return Ok(Averaged { value: vec![0.0; rhos.len()], error: vec![0.0; rhos.len()] });
    }
    let a = interval.start;
    let b = a + interval.length;
    let breaks = direction_breaks(body, a, b);
    let mut err = None;
    let r = quad::integrate_vec(
        |th, out| match Ray::new(body, th) {
            Ok(ray) => out.copy_from_slice(&scale_moments(ray.moments(rhos, opts.delta_power), rhos, opts.delta_power)),
            Err(e) => {
                err.get_or_insert(e);
                out.fill(0.0);
            }
        },
        a,
        b,
        &breaks,
        rhos.len(),
        opts.rel_tol,
        1e-300,
        opts.max_segments,
    );
    if let Some(e) = err {
        return Err(e);
    }
    if !r.converged {
        let worst = r.error.iter().zip(&r.value).map(|(e, v)| e / v.abs().max(1e-300)).fold(0.0, f64::max);
        if worst > 100.0 * opts.rel_tol {
            return Err(FourierError::Quadrature { what: "rotation average".into(), error: worst });
        }
    }
    Ok(Averaged { value: r.value, error: r.error })
}

pub fn rotation_dilation_avg_sq(body: &ConvexBody, interval: &AngleInterval, rho: f64) -> Result<f64, FourierError> {
    Ok(rotation_dilation_avg_sq_many(body, interval, &[rho], &AvgOptions::default())?.value[0])
}

/// `∫_I |FT_C(ρ u(θ))|² dθ`.
pub fn spherical_avg_sq(body: &ConvexBody, interval: &AngleInterval, rho: f64) -> Result<f64, FourierError> {
    spherical_avg_sq_with(body, interval, rho, &AvgOptions::default())
}

pub fn spherical_avg_sq_with(
    body: &ConvexBody,
    interval: &AngleInterval,
    rho: f64,
    opts: &AvgOptions,
) -> Result<f64, FourierError> {
    if interval.length <= 0.0 {
        return Ok(0.0);
    }
    let a = interval.start;
    let b = a + interval.length;
    // the transform oscillates in θ on the scale 1/(ρ·diam)
    let mut breaks = direction_breaks(body, a, b);
    let n = (rho * interval.length).ceil() as usize;
    breaks.extend((1..n).map(|k| a + (b - a) * k as f64 / n as f64));
    breaks.sort_by(f64::total_cmp);
    let mut err = None;
    let r = quad::integrate(
        |th| match Ray::new(body, th) {
            Ok(ray) => ray.ft(rho).norm_sqr(),
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        a,
        b,
        &breaks,
        0.0,
        opts.rel_tol,
        opts.max_segments.max(4 * n),
    );
    if let Some(e) = err {
        return Err(e);
    }
    if !r.converged && r.error > 100.0 * opts.rel_tol * r.value.abs() {
        return Err(FourierError::Quadrature { what: "spherical average".into(), error: r.error });
    }
    Ok(r.value)
}
