use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::{wrap_pm, Vec2};
use crate::quad;

/// `x ↦ offset + scale·Q·x` with `Q` orthogonal (rotation, optionally composed
/// with a reflection).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub q: [[f64; 2]; 2],
    pub scale: f64,
    pub offset: Vec2,
}

impl Similarity {
    pub fn identity() -> Self {
        Similarity { q: [[1.0, 0.0], [0.0, 1.0]], scale: 1.0, offset: Vec2::ZERO }
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Similarity { q: [[c, -s], [s, c]], ..Self::identity() }
    }

    /// Reflection across the line through the origin with direction `u(beta)`.
    pub fn reflection(beta: f64) -> Self {
        let (s, c) = (2.0 * beta).sin_cos();
        Similarity { q: [[c, s], [s, -c]], ..Self::identity() }
    }

    pub fn scaling(s: f64) -> Self {
        Similarity { scale: s, ..Self::identity() }
    }

    pub fn translation(v: Vec2) -> Self {
        Similarity { offset: v, ..Self::identity() }
    }

    pub fn det(&self) -> f64 {
        self.q[0][0] * self.q[1][1] - self.q[0][1] * self.q[1][0]
    }

    pub fn linear(&self, v: Vec2) -> Vec2 {
        Vec2::new(self.q[0][0] * v.x + self.q[0][1] * v.y, self.q[1][0] * v.x + self.q[1][1] * v.y)
    }

    pub fn apply(&self, v: Vec2) -> Vec2 {
        self.offset + self.linear(v) * self.scale
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        let mut q = [[0.0; 2]; 2];
        for (i, row) in q.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.q[i][0] * other.q[0][j] + self.q[i][1] * other.q[1][j];
            }
        }
        Similarity { q, scale: self.scale * other.scale, offset: self.apply(other.offset) }
    }
}

/// `origin + x·e1 + coef·x^alpha·e2` for `x` running from `x0` to `x1` (both ≥ 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerArc {
    pub origin: Vec2,
    pub e1: Vec2,
    pub e2: Vec2,
    pub coef: f64,
    pub alpha: f64,
    pub x0: f64,
    pub x1: f64,
}

impl PowerArc {
    fn x(&self, t: f64) -> f64 {
        self.x0 + t * (self.x1 - self.x0)
    }
}

/// One boundary piece, parameterised by `t ∈ [0, 1]` in counterclockwise order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Segment { a: Vec2, b: Vec2 },
    /// `center + radius·u(start + t·sweep)`; the sweep is positive on a valid body.
    Circular { center: Vec2, radius: f64, start: f64, sweep: f64 },
    Power(PowerArc),
}

impl Piece {
    pub fn point(&self, t: f64) -> Vec2 {
        match *self {
            Piece::Segment { a, b } => a + (b - a) * t,
            Piece::Circular { center, radius, start, sweep } => center + Vec2::unit(start + t * sweep) * radius,
            Piece::Power(p) => {
                let x = p.x(t);
                p.origin + p.e1 * x + p.e2 * (p.coef * x.powf(p.alpha))
            }
        }
    }

    pub fn deriv(&self, t: f64) -> Vec2 {
        match *self {
            Piece::Segment { a, b } => b - a,
            Piece::Circular { radius, start, sweep, .. } => {
                Vec2::unit(start + t * sweep).perp() * (radius * sweep)
            }
            Piece::Power(p) => {
                let x = p.x(t);
                let slope = p.coef * p.alpha * x.max(0.0).powf(p.alpha - 1.0);
                (p.e1 + p.e2 * slope) * (p.x1 - p.x0)
            }
        }
    }

    pub fn start_point(&self) -> Vec2 {
        self.point(0.0)
    }

    pub fn end_point(&self) -> Vec2 {
        self.point(1.0)
    }

    /// Tangent direction at `t`, as an angle in `(-π, π]`.
    pub fn tangent_angle(&self, t: f64) -> f64 {
        match *self {
            Piece::Circular { start, sweep, .. } => {
                wrap_pm(start + t * sweep + FRAC_PI_2.copysign(sweep))
            }
            _ => self.deriv(t).angle(),
        }
    }

    /// Signed total turning of the tangent along the piece.
    pub fn turn(&self) -> f64 {
        match *self {
            Piece::Segment { .. } => 0.0,
            Piece::Circular { sweep, .. } => sweep,
            Piece::Power(_) => wrap_pm(self.tangent_angle(1.0) - self.tangent_angle(0.0)),
        }
    }

    /// Parameter at which the tangent has turned by `rel` (0 ≤ rel ≤ turn) from its start.
    pub fn t_at_turn(&self, rel: f64) -> f64 {
        let total = self.turn();
        if total <= 0.0 {
            return 0.0;
        }
        let rel = rel.clamp(0.0, total);
        match *self {
            Piece::Segment { .. } => 0.0,
            Piece::Circular { sweep, .. } => rel / sweep,
            Piece::Power(_) => {
                let a0 = self.tangent_angle(0.0);
                let g = |t: f64| wrap_pm(self.tangent_angle(t) - a0) - rel;
                quad::brent(g, 0.0, 1.0, 1e-14).unwrap_or(0.0).clamp(0.0, 1.0)
            }
        }
    }

    /// Turning accumulated from the start up to `t`.
    pub fn turn_at(&self, t: f64) -> f64 {
        match *self {
            Piece::Segment { .. } => 0.0,
            Piece::Circular { sweep, .. } => t * sweep,
            Piece::Power(_) => wrap_pm(self.tangent_angle(t) - self.tangent_angle(0.0)),
        }
    }

    pub fn length(&self) -> f64 {
        self.arclen(1.0)
    }

    /// Arc length from the start up to parameter `t`.
    pub fn arclen(&self, t: f64) -> f64 {
        match *self {
            Piece::Segment { a, b } => (b - a).norm() * t,
            Piece::Circular { radius, sweep, .. } => radius * sweep.abs() * t,
            Piece::Power(_) => {
                if t <= 0.0 {
                    return 0.0;
                }
                quad::integrate(|s| self.deriv(s).norm(), 0.0, t, &[], 1e-15, 1e-13, 500).value
            }
        }
    }

    /// Inverse of [`Piece::arclen`].
    pub fn t_at_arclen(&self, s: f64) -> f64 {
        let len = self.length();
        if len <= 0.0 {
            return 0.0;
        }
        let s = s.clamp(0.0, len);
        match *self {
            Piece::Power(_) => {
                quad::brent(|t| self.arclen(t) - s, 0.0, 1.0, 1e-14).unwrap_or(s / len).clamp(0.0, 1.0)
            }
            _ => s / len,
        }
    }

    pub fn reversed(&self) -> Piece {
        match *self {
            Piece::Segment { a, b } => Piece::Segment { a: b, b: a },
            Piece::Circular { center, radius, start, sweep } => {
                Piece::Circular { center, radius, start: start + sweep, sweep: -sweep }
            }
            Piece::Power(p) => Piece::Power(PowerArc { x0: p.x1, x1: p.x0, ..p }),
        }
    }

    pub fn transformed(&self, m: &Similarity) -> Piece {
        match *self {
            Piece::Segment { a, b } => Piece::Segment { a: m.apply(a), b: m.apply(b) },
            Piece::Circular { center, radius, start, sweep } => Piece::Circular {
                center: m.apply(center),
                radius: radius * m.scale,
                start: m.linear(Vec2::unit(start)).angle(),
                sweep: sweep * m.det().signum(),
            },
            Piece::Power(p) => {
                let s = m.scale;
                Piece::Power(PowerArc {
                    origin: m.apply(p.origin),
                    e1: m.linear(p.e1),
                    e2: m.linear(p.e2),
                    coef: p.coef * s.powf(1.0 - p.alpha),
                    alpha: p.alpha,
                    x0: p.x0 * s,
                    x1: p.x1 * s,
                })
            }
        }
    }

    pub fn is_segment(&self) -> bool {
        matches!(self, Piece::Segment { .. })
    }

    /// `∫ (x dy - y dx)`, `∫ x² dy` and `∫ y² dx` along the piece.
    pub(crate) fn green_moments(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let f = |t: f64| {
                let p = self.point(t);
                let d = self.deriv(t);
                match k {
                    0 => p.x * d.y - p.y * d.x,
                    1 => p.x * p.x * d.y,
                    _ => p.y * p.y * d.x,
                }
            };
            *o = quad::integrate(f, 0.0, 1.0, &[], 1e-15, 1e-14, 500).value;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_arc_basics() {
        let c = Piece::Circular { center: Vec2::ZERO, radius: 2.0, start: 0.0, sweep: PI };
        assert!((c.length() - 2.0 * PI).abs() < 1e-14);
        assert!((c.tangent_angle(0.0) - PI / 2.0).abs() < 1e-14);
        let r = c.reversed();
        assert!((r.start_point() - c.end_point()).norm() < 1e-14);
    }

    #[test]
    fn power_arc_length_matches_parabola_closed_form() {
        let p = Piece::Power(PowerArc {
            origin: Vec2::ZERO,
            e1: Vec2::new(1.0, 0.0),
            e2: Vec2::new(0.0, 1.0),
            coef: 1.0,
            alpha: 2.0,
            x0: 0.0,
            x1: 1.0,
        });
        let exact = 0.5 * 5f64.sqrt() + 0.25 * (2.0 + 5f64.sqrt()).ln();
        assert!((p.length() - exact).abs() < 1e-12);
        let t = p.t_at_arclen(0.5);
        assert!((p.arclen(t) - 0.5).abs() < 1e-12);
        assert!((p.turn() - 2f64.atan()).abs() < 1e-14);
        let t = p.t_at_turn(1f64.atan());
        assert!((t - 0.5).abs() < 1e-12);
    }

    #[test]
    fn similarity_keeps_power_arc_points() {
        let p = Piece::Power(PowerArc {
            origin: Vec2::new(0.1, 0.2),
            e1: Vec2::new(1.0, 0.0),
            e2: Vec2::new(0.0, 1.0),
            coef: 1.3,
            alpha: 2.5,
            x0: 0.4,
            x1: 0.0,
        });
        let m = Similarity::rotation(0.7)
            .compose(&Similarity::reflection(0.3))
            .compose(&Similarity::scaling(0.4));
        let m = Similarity::translation(Vec2::new(1.0, -2.0)).compose(&m);
        let q = p.transformed(&m);
        for t in [0.0, 0.3, 0.9, 1.0] {
            assert!((q.point(t) - m.apply(p.point(t))).norm() < 1e-14);
        }
    }
}
