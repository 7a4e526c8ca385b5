//! Planar convex bodies and the geometric queries on them: support values,
//! chords, semi-chords, sets of normals, angular trace, portion of perimeter.

mod body;
mod piece;
mod queries;

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub use body::{BodyError, BodyKind, BodySpec, BoundaryPos, ConvexBody, PieceSpec};
pub use piece::{Piece, PowerArc, Similarity};
pub use queries::{AngularTrace, ChordRecord, SemiChordRecord};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// The unit vector `u(θ) = (cos θ, sin θ)`.
    pub fn unit(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c, y: s }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Counterclockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2 { x: -self.y, y: self.x }
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2 { x: c * self.x - s * self.y, y: s * self.x + c * self.y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2 { x: self.x * s, y: self.y * s }
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2 { x: -self.x, y: -self.y }
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2 { x: a[0], y: a[1] }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// Canonical representative of an angle in `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Representative in `[-π, π)`.
pub fn wrap_pm(theta: f64) -> f64 {
    let r = (theta + PI).rem_euclid(TAU) - PI;
    if r >= PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("non-finite input to eta: p={p}, x1={x1}, x2={x2}")]
pub struct EtaError {
    pub p: f64,
    pub x1: f64,
    pub x2: f64,
}

/// Ordered distance on `T_p`: the `y ∈ [0, p)` with `x1 + y ≡ x2 (mod p)`.
pub fn eta(p: f64, x1: f64, x2: f64) -> Result<f64, EtaError> {
    if !(p.is_finite() && x1.is_finite() && x2.is_finite()) || p <= 0.0 {
        return Err(EtaError { p, x1, x2 });
    }
    let y = (x2 - x1).rem_euclid(p);
    Ok(if y >= p { 0.0 } else { y })
}

/// Closed arc `[start, start + length]` on the circle of directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    pub start: f64,
    pub length: f64,
}

impl AngleInterval {
    pub fn new(start: f64, length: f64) -> Self {
        AngleInterval { start: normalize_angle(start), length: length.clamp(0.0, TAU) }
    }

    /// The interval `[a, b]` traversed counterclockwise from `a`.
    pub fn from_endpoints(a: f64, b: f64) -> Self {
        let len = (b - a).rem_euclid(TAU);
        AngleInterval::new(a, len)
    }

    pub fn full() -> Self {
        AngleInterval { start: 0.0, length: TAU }
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    pub fn is_full(&self) -> bool {
        self.length >= TAU
    }

    /// Closed-interval membership with slack `tol`.
    pub fn contains(&self, theta: f64, tol: f64) -> bool {
        if self.length + tol >= TAU {
            return true;
        }
        let d = (theta - self.start).rem_euclid(TAU);
        d <= self.length + tol || d >= TAU - tol
    }

    /// Membership in the open interval.
    pub fn contains_open(&self, theta: f64, tol: f64) -> bool {
        if self.length >= TAU {
            return true;
        }
        let d = (theta - self.start).rem_euclid(TAU);
        d > tol && d < self.length - tol
    }

    pub fn shifted(&self, delta: f64) -> Self {
        AngleInterval::new(self.start + delta, self.length)
    }

    /// Intersection with another arc, as a list of at most two arcs.
    pub fn intersect(&self, other: &AngleInterval) -> Vec<AngleInterval> {
        if self.is_full() {
            return if other.length > 0.0 { vec![*other] } else { vec![] };
        }
        if other.is_full() {
            return if self.length > 0.0 { vec![*self] } else { vec![] };
        }
        let mut out = Vec::new();
        // unroll `other` relative to self.start
        let o0 = (other.start - self.start).rem_euclid(TAU);
        for shift in [-TAU, 0.0] {
            let lo = (o0 + shift).max(0.0);
            let hi = (o0 + shift + other.length).min(self.length);
            if hi > lo {
                out.push(AngleInterval::new(self.start + lo, hi - lo));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_examples() {
        assert!((eta(TAU, 0.0, PI / 2.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((eta(1.0, 0.75, 0.25).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(eta(3.0, 1.2, 1.2).unwrap(), 0.0);
        assert!(eta(1.0, f64::NAN, 0.0).is_err());
        assert!(eta(0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn interval_intersection_wraps() {
        let a = AngleInterval::new(-0.5, 1.0);
        let b = AngleInterval::new(0.25, 3.0);
        let c = a.intersect(&b);
        assert_eq!(c.len(), 1);
        assert!((c[0].start - 0.25).abs() < 1e-12 && (c[0].length - 0.25).abs() < 1e-12);
        let d = AngleInterval::new(5.0, 3.0).intersect(&AngleInterval::new(1.0, 5.0));
        let total: f64 = d.iter().map(|i| i.length).sum();
        assert_eq!(d.len(), 2);
        assert!((total - (1.0 + (8.0 - TAU - 1.0))).abs() < 1e-12);
    }

    #[test]
    fn contains_is_closed() {
        let i = AngleInterval::new(0.0, PI / 2.0);
        assert!(i.contains(PI / 2.0, 0.0));
        assert!(i.contains(0.0, 0.0));
        assert!(!i.contains_open(0.0, 0.0));
        assert!(!i.contains(PI, 1e-9));
    }
}
