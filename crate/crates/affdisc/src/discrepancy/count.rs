use std::f64::consts::{FRAC_PI_2, TAU};

use crate::geometry::{wrap_pm, ConvexBody, Vec2};

/// Transform `x ↦ τ + δσ_θ x` applied to a body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTransform {
    pub tau: Vec2,
    pub delta: f64,
    pub theta: f64,
}

const SECTORS: usize = 1024;

#[derive(Debug, Clone)]
struct Sector {
    angle: f64,
    s: f64,
    p: Vec2,
    normal: Vec2,
}

/// Exact point-in-body test.
#[derive(Debug, Clone)]
pub struct Containment {
    body: ConvexBody,
    center: Vec2,
    sectors: Vec<Sector>,
}

impl Containment {
    pub fn new(body: &ConvexBody) -> Self {
        let center = body.centroid();
        let mut sectors = Vec::new();
        if !body.is_polygon() {
            let per = body.perimeter();
            for j in 0..SECTORS {
                let s = per * j as f64 / SECTORS as f64;
                let p = body.point(body.pos_at_arclen(s));
                let nu = body.normal_interval(s).start;
                sectors.push(Sector { angle: (p - center).angle(), s, p, normal: Vec2::unit(nu) });
            }
        }
        Containment { body: body.clone(), center, sectors }
    }

    pub fn contains(&self, y: Vec2) -> bool {
        if self.body.is_polygon() {
            let v = self.body.vertices();
            let n = v.len();
            return (0..n).all(|i| (v[(i + 1) % n] - v[i]).cross(y - v[i]) >= 0.0);
        }
        let d = y - self.center;
        let phi = d.angle();
        // sector angles increase counterclockwise from sectors[0]
        let base = self.sectors[0].angle;
        let rel = (phi - base).rem_euclid(TAU);
        let j = self.sectors.partition_point(|s| (s.angle - base).rem_euclid(TAU) <= rel).max(1) - 1;
        let a = &self.sectors[j];
        let b = &self.sectors[(j + 1) % SECTORS];
        if (b.p - a.p).cross(y - a.p) >= 0.0 {
            return true;
        }
        if y.dot(a.normal) < a.p.dot(a.normal) || y.dot(b.normal) < b.p.dot(b.normal) {
            return false;
        }
        // boundary point in direction φ by bisection on arc length
        let per = self.body.perimeter();
        let (mut lo, mut hi) = (a.s, if j + 1 == SECTORS { per } else { b.s });
        let off = |s: f64| wrap_pm((self.body.point(self.body.pos_at_arclen(s)) - self.center).angle() - phi);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if off(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = self.body.point(self.body.pos_at_arclen(0.5 * (lo + hi)));
        d.norm() <= (q - self.center).norm()
    }

    pub fn body(&self) -> &ConvexBody {
        &self.body
    }

    /// `Σ_p #{n ∈ Z² : p + n ∈ τ + δσ_θC}`.
    pub fn count(&self, points: &[Vec2], t: &AffineTransform) -> usize {
        if !(t.delta > 0.0) {
            return 0;
        }
        let b = &self.body;
        let (x0, x1) = (t.tau.x + t.delta * b.min_dot(-t.theta), t.tau.x + t.delta * b.support(-t.theta));
        let (y0, y1) =
            (t.tau.y + t.delta * b.min_dot(FRAC_PI_2 - t.theta), t.tau.y + t.delta * b.support(FRAC_PI_2 - t.theta));
        let (s, c) = t.theta.sin_cos();
        let inv = 1.0 / t.delta;
        let mut total = 0;
        for p in points {
            let n1 = ((x0 - p.x).ceil() as i64)..=((x1 - p.x).floor() as i64);
            for a in n1 {
                for bb in ((y0 - p.y).ceil() as i64)..=((y1 - p.y).floor() as i64) {
                    let w = Vec2::new(p.x + a as f64 - t.tau.x, p.y + bb as f64 - t.tau.y);
                    // σ_{-θ} w / δ
                    let y = Vec2::new(c * w.x + s * w.y, -s * w.x + c * w.y) * inv;
                    if self.contains(y) {
                        total += 1;
                    }
                }
            }
        }
        total
    }
}

/// `D(P, τ + δσ_θC) = Σ_p 𝔓1(p) − N δ²|C|`.
pub fn discrepancy(points: &[Vec2], body: &ConvexBody, t: &AffineTransform) -> f64 {
    discrepancy_with(&Containment::new(body), points, t)
}

pub fn discrepancy_with(c: &Containment, points: &[Vec2], t: &AffineTransform) -> f64 {
    c.count(points, t) as f64 - points.len() as f64 * t.delta * t.delta * c.body().area()
}

