use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::body::{BodyError, BoundaryPos, ConvexBody};
use super::{eta, normalize_angle, AngleInterval, Vec2};
use crate::quad;

/// A chord `K(θ, λ)` with its endpoints; `p_minus - p_plus = length·u'(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordRecord {
    pub theta: f64,
    pub lambda: f64,
    pub length: f64,
    pub p_minus: Vec2,
    pub p_plus: Vec2,
    pub pos_minus: BoundaryPos,
    pub pos_plus: BoundaryPos,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiChordRecord {
    pub base: ChordRecord,
    pub s_minus: f64,
    pub s_plus: f64,
    pub s_o: f64,
    pub left_len: f64,
    pub right_len: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AngularTrace {
    /// Open arcs of directions: interiors of the normal sets of angular points.
    pub components: Vec<AngleInterval>,
    pub psi: f64,
}

impl ConvexBody {
    fn level(&self, pos: BoundaryPos, u: Vec2) -> f64 {
        self.point(pos).dot(u)
    }

    fn solve_on_piece(&self, piece: usize, ta: f64, tb: f64, u: Vec2, h: f64) -> f64 {
        let p = &self.pieces()[piece];
        let f = |t: f64| p.point(t).dot(u) - h;
        let (fa, fb) = (f(ta), f(tb));
        if fa >= 0.0 {
            return ta;
        }
        if fb <= 0.0 {
            return tb;
        }
        if p.is_segment() {
            return (ta + (tb - ta) * (-fa) / (fb - fa)).clamp(ta.min(tb), ta.max(tb));
        }
        quad::brent(f, ta, tb, 1e-13).unwrap_or(0.5 * (ta + tb))
    }

    /// The chord `K(θ, λ)` at depth `λ` above the supporting line `x·u(θ) = min`.
    pub fn chord(&self, theta: f64, lambda: f64) -> Result<ChordRecord, BodyError> {
        let u = Vec2::unit(theta);
        let (lo, hi) = self.argmin(theta);
        let (tlo, thi) = self.argmin(theta + PI);
        let min = self.level(lo, u);
        let max = self.level(tlo, u);
        let width = max - min;
        let tol = 1e-12 * (1.0 + width);
        if !(lambda >= -tol && lambda <= width + tol) || !lambda.is_finite() {
            return Err(BodyError::EmptyChord { lambda, width });
        }
        let lambda = lambda.clamp(0.0, width);
        let (pos_minus, pos_plus) = if lambda >= width - tol {
            // top supporting set, traversed from the other side
            (thi, tlo)
        } else if lambda == 0.0 {
            (lo, hi)
        } else {
            let h = min + lambda;
            let n = self.pieces().len();
            // counterclockwise from hi
            let mut plus = hi;
            let (mut i, mut t0) = (hi.piece, hi.t);
            for step in 0..=n {
                let p = &self.pieces()[i];
                // the level rises until the top point, which may sit inside a piece
                let te = if i == tlo.piece && (step > 0 || tlo.t >= t0) { tlo.t } else { 1.0 };
                if p.point(te).dot(u) >= h {
                    plus = BoundaryPos { piece: i, t: self.solve_on_piece(i, t0, te, u, h) };
                    break;
                }
                i = (i + 1) % n;
                t0 = 0.0;
            }
            // clockwise from lo
            let mut minus = lo;
            let (mut j, mut t1) = (lo.piece, lo.t);
            for step in 0..=n {
                let p = &self.pieces()[j];
                let ts = if j == thi.piece && (step > 0 || thi.t <= t1) { thi.t } else { 0.0 };
                if p.point(ts).dot(u) >= h {
                    minus = BoundaryPos { piece: j, t: self.solve_on_piece(j, t1, ts, u, h) };
                    break;
                }
                j = (j + n - 1) % n;
                t1 = 1.0;
            }
            (minus, plus)
        };
        let p_minus = self.point(pos_minus);
        let p_plus = self.point(pos_plus);
        let length = (p_minus - p_plus).dot(u.perp()).max(0.0);
        Ok(ChordRecord { theta, lambda, length, p_minus, p_plus, pos_minus, pos_plus })
    }

    /// Chord length only.
    pub fn chord_length(&self, theta: f64, lambda: f64) -> Result<f64, BodyError> {
        self.chord(theta, lambda).map(|c| c.length)
    }

    /// `γ(θ, λ) = max(|K(θ, λ)|, |K(θ + π, λ)|)`.
    pub fn gamma(&self, theta: f64, lambda: f64) -> Result<f64, BodyError> {
        Ok(self.chord_length(theta, lambda)?.max(self.chord_length(theta + PI, lambda)?))
    }

    /// Right and left semi-chords of `K(θ, λ)`.
    pub fn semi_chords(&self, theta: f64, lambda: f64) -> Result<SemiChordRecord, BodyError> {
        let base = self.chord(theta, lambda)?;
        let (lo, hi) = self.argmin(theta);
        let p = self.perimeter();
        let so_minus = self.arclen_of(lo);
        let so_plus = self.arclen_of(hi);
        let d = eta(p, so_minus, so_plus).expect("finite arc lengths");
        let s_o = (so_minus + 0.5 * d).rem_euclid(p);
        let split = if lo == hi {
            self.point(lo)
        } else {
            // only a segment can support with lo != hi
            0.5 * (self.point(lo) + self.point(hi))
        };
        let up = Vec2::unit(theta).perp();
        let right = (split - base.p_plus).dot(up).clamp(0.0, base.length);
        Ok(SemiChordRecord {
            base,
            s_minus: self.arclen_of(base.pos_minus),
            s_plus: self.arclen_of(base.pos_plus),
            s_o,
            left_len: base.length - right,
            right_len: right,
        })
    }

    /// The set of normals `ν(s) = [ν⁻(s), ν⁺(s)]` at arc length `s`.
    pub fn normal_interval(&self, s: f64) -> AngleInterval {
        let p = self.perimeter();
        let s = s.rem_euclid(p);
        let offsets = self.piece_offsets();
        let n = self.pieces().len();
        let tol = 1e-12 * p;
        for i in 0..n {
            if (s - offsets[i]).abs() <= tol || (i == 0 && (p - s) <= tol) {
                let (lo, hi) = self.joint_normals(i);
                if self.is_angular_joint(i) {
                    return AngleInterval::new(lo, hi - lo);
                }
                return AngleInterval::new(hi, 0.0);
            }
        }
        let pos = self.pos_at_arclen(s);
        AngleInterval::new(self.normal_at(pos), 0.0)
    }

    /// Normal sets of all angular points, in boundary order, with their arc-length position.
    pub fn angular_points(&self) -> Vec<(f64, AngleInterval)> {
        (0..self.pieces().len())
            .filter(|&i| self.is_angular_joint(i))
            .map(|i| {
                let (lo, hi) = self.joint_normals(i);
                (self.piece_offsets()[i], AngleInterval::new(lo, hi - lo))
            })
            .collect()
    }

    /// Angular trace and symmetric angular threshold.
    pub fn angular_trace(&self) -> AngularTrace {
        let components: Vec<AngleInterval> = self.angular_points().into_iter().map(|(_, i)| i).collect();
        let mut psi: f64 = 0.0;
        for a in &components {
            for b in &components {
                for c in a.intersect(&b.shifted(PI)) {
                    psi = psi.max(c.length);
                }
            }
        }
        AngularTrace { components, psi: psi.min(PI.next_down()) }
    }

    /// Normal angles at which the direction-dependent geometry changes:
    /// endpoints of normal sets at angular points and normals of segments.
    pub fn critical_normals(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.pieces().len() {
            if self.is_angular_joint(i) {
                let (lo, hi) = self.joint_normals(i);
                out.push(normalize_angle(lo));
                out.push(normalize_angle(hi));
            }
            if self.pieces()[i].is_segment() {
                out.push(normalize_angle(self.piece_normals(i).0));
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
        out
    }

    /// Arc-length measure of `{s : ν(s) ∩ I ≠ ∅}` for the closed interval `I`.
    pub fn portion_of_perimeter(&self, interval: &AngleInterval) -> f64 {
        if interval.is_full() {
            return self.perimeter();
        }
        let mut total = 0.0;
        for (i, piece) in self.pieces().iter().enumerate() {
            let (lo, hi) = self.piece_normals(i);
            if piece.is_segment() {
                if interval.contains(lo, 1e-13) {
                    total += piece.length();
                }
                continue;
            }
            let span = AngleInterval::new(lo, hi - lo);
            for part in span.intersect(interval) {
                // turning measured from this piece's start normal
                let r0 = (part.start - lo).rem_euclid(TAU);
                let r0 = if r0 > hi - lo + 1e-12 { 0.0 } else { r0 };
                let r1 = (r0 + part.length).min(hi - lo);
                let t0 = piece.t_at_turn(r0);
                let t1 = piece.t_at_turn(r1);
                total += piece.arclen(t1) - piece.arclen(t0);
            }
        }
        total
    }

    /// Longest and shortest directional diameters `(L, S)`.
    pub fn diameters(&self) -> (f64, f64) {
        let l = if self.is_polygon() {
            let v = self.vertices();
            let mut m: f64 = 0.0;
            for a in v {
                for b in v {
                    m = m.max((*a - *b).norm());
                }
            }
            m
        } else {
            refine_extremum(|th| self.width(th), true)
        };
        let s = refine_extremum(|th| self.max_chord(th), false);
        (l, s)
    }

    /// `max_λ |K(θ, λ)|`.
    pub fn max_chord(&self, theta: f64) -> f64 {
        let w = self.width(theta);
        if self.is_polygon() {
            let u = Vec2::unit(theta);
            let min = self.min_dot(theta);
            let mut best: f64 = 0.0;
            for v in self.vertices() {
                let lam = (v.dot(u) - min).clamp(0.0, w);
                best = best.max(self.chord_length(theta, lam).unwrap_or(0.0));
            }
            return best;
        }
        quad::golden_max(|lam| self.chord_length(theta, lam).unwrap_or(0.0), 0.0, w, 80).1
    }

    /// `(1/2λ) ∫_I |K⁺(θ, λ)|² dθ` by adaptive quadrature.
    pub fn semichord_average(&self, interval: &AngleInterval, lambda: f64) -> Result<quad::QuadResult, BodyError> {
        if interval.length <= 0.0 {
            return Ok(quad::QuadResult { value: 0.0, error: 0.0, converged: true });
        }
        let a = interval.start;
        let b = interval.start + interval.length;
        let mut breaks = Vec::new();
        for c in self.critical_normals() {
            for k in -1..=2 {
                let x = c + k as f64 * TAU;
                if x > a && x < b {
                    breaks.push(x);
                }
            }
        }
        let mut err = None;
        let r = quad::integrate(
            |th| match self.semi_chords(th, lambda) {
                Ok(sc) => sc.right_len * sc.right_len,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            &breaks,
            1e-14,
            1e-7,
            20_000,
        );
        if let Some(e) = err {
            return Err(e);
        }
        Ok(quad::QuadResult { value: r.value / (2.0 * lambda), error: r.error / (2.0 * lambda), converged: r.converged })
    }
}

/// Max (or min) of a π-periodic function of direction: dense scan plus golden refinement.
fn refine_extremum<F: Fn(f64) -> f64>(f: F, maximize: bool) -> f64 {
    const N: usize = 720;
    let sign = if maximize { 1.0 } else { -1.0 };
    let h = PI / N as f64;
    let vals: Vec<f64> = (0..N).map(|k| sign * f(k as f64 * h)).collect();
    let mut order: Vec<usize> = (0..N).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut best = vals[order[0]];
    for &k in order.iter().take(4) {
        let c = k as f64 * h;
        let (_, v) = quad::golden_max(|x| sign * f(x), c - h, c + h, 60);
        best = best.max(v);
    }
    sign * best
}
