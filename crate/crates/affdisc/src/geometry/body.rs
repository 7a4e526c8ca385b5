use std::f64::consts::{FRAC_PI_2, TAU};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::piece::{Piece, PowerArc, Similarity};
use super::{normalize_angle, wrap_pm, Vec2};

const JOINT_TOL: f64 = 1e-9;
const ANGULAR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BodyError {
    #[error("body needs at least {0} boundary elements")]
    TooFewPieces(usize),
    #[error("non-finite coordinate in piece {0}")]
    NonFinite(usize),
    #[error("gap of {gap:e} between piece {piece} and the next one")]
    Open { piece: usize, gap: f64 },
    #[error("boundary turns clockwise at {0}")]
    NotConvex(String),
    #[error("total turning {0} differs from 2π")]
    Turning(f64),
    #[error("body has empty interior")]
    Degenerate,
    #[error("chord depth {lambda} outside [0, {width}]")]
    EmptyChord { lambda: f64, width: f64 },
    #[error("invalid body description: {0}")]
    Spec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    Polygon,
    Arcs,
}

/// Position on the boundary: piece index and local parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPos {
    pub piece: usize,
    pub t: f64,
}

/// A planar convex body bounded by a closed counterclockwise chain of pieces.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    kind: BodyKind,
    pieces: Vec<Piece>,
    vertices: Vec<Vec2>,
    cum_len: Vec<f64>,
    // tangent turning (relative to the start of piece 0) at the start and end of each piece
    rel_start: Vec<f64>,
    rel_end: Vec<f64>,
    tan0: f64,
    perimeter: f64,
    area: f64,
    centroid: Vec2,
}

impl ConvexBody {
    /// Polygon from counterclockwise vertices. Collinear repeats are dropped.
    pub fn polygon(vertices: &[Vec2]) -> Result<Self, BodyError> {
        let mut v: Vec<Vec2> = Vec::with_capacity(vertices.len());
        for (i, &p) in vertices.iter().enumerate() {
            if !p.is_finite() {
                return Err(BodyError::NonFinite(i));
            }
            if v.last().is_none_or(|&q: &Vec2| (p - q).norm() > 0.0) {
                v.push(p);
            }
        }
        while v.len() > 1 && (v[0] - v[v.len() - 1]).norm() == 0.0 {
            v.pop();
        }
        // drop vertices where the boundary does not turn
        let mut changed = true;
        while changed && v.len() >= 3 {
            changed = false;
            for i in 0..v.len() {
                let a = v[(i + v.len() - 1) % v.len()];
                let b = v[i];
                let c = v[(i + 1) % v.len()];
                let cr = (b - a).cross(c - b);
                let scale = (b - a).norm() * (c - b).norm();
                if cr.abs() <= 1e-14 * scale && (b - a).dot(c - b) > 0.0 {
                    v.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        if v.len() < 3 {
            return Err(BodyError::TooFewPieces(3));
        }
        let pieces = (0..v.len()).map(|i| Piece::Segment { a: v[i], b: v[(i + 1) % v.len()] }).collect();
        let mut body = Self::build(BodyKind::Polygon, pieces)?;
        body.vertices = v;
        Ok(body)
    }

    /// Body bounded by a counterclockwise closed chain of arcs.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self, BodyError> {
        let mut out = Vec::with_capacity(pieces.len());
        for p in pieces.into_iter().filter(|p| p.length() > 0.0) {
            // long circular arcs are split so every piece is monotone in each direction
            match p {
                Piece::Circular { center, radius, start, sweep } if sweep.abs() > FRAC_PI_2 => {
                    let k = (sweep.abs() / FRAC_PI_2).ceil() as usize;
                    let step = sweep / k as f64;
                    for j in 0..k {
                        out.push(Piece::Circular { center, radius, start: start + j as f64 * step, sweep: step });
                    }
                }
                _ => out.push(p),
            }
        }
        Self::build(BodyKind::Arcs, out)
    }

    fn build(kind: BodyKind, pieces: Vec<Piece>) -> Result<Self, BodyError> {
        let n = pieces.len();
        if n == 0 || (kind == BodyKind::Polygon && n < 3) {
            return Err(BodyError::TooFewPieces(if kind == BodyKind::Polygon { 3 } else { 1 }));
        }
        let mut scale: f64 = 0.0;
        for (i, p) in pieces.iter().enumerate() {
            if !(p.start_point().is_finite() && p.end_point().is_finite()) {
                return Err(BodyError::NonFinite(i));
            }
            scale = scale.max(p.start_point().norm()).max(p.length());
        }
        let scale = scale.max(1e-300);
        let mut rel_start = Vec::with_capacity(n);
        let mut rel_end = Vec::with_capacity(n);
        let tan0 = pieces[0].tangent_angle(0.0);
        let mut acc = 0.0;
        for i in 0..n {
            let p = &pieces[i];
            let turn = p.turn();
            if turn < -ANGULAR_TOL {
                return Err(BodyError::NotConvex(format!("piece {i}")));
            }
            rel_start.push(acc);
            acc += turn.max(0.0);
            rel_end.push(acc);
            let next = &pieces[(i + 1) % n];
            let gap = (p.end_point() - next.start_point()).norm();
            if gap > JOINT_TOL * scale.max(1.0) {
                return Err(BodyError::Open { piece: i, gap });
            }
            let jump = wrap_pm(next.tangent_angle(0.0) - p.tangent_angle(1.0));
            if jump < -ANGULAR_TOL {
                return Err(BodyError::NotConvex(format!("joint after piece {i}")));
            }
            // a reversal of direction (jump ≈ π) is degenerate
            if jump >= std::f64::consts::PI - 1e-12 {
                return Err(BodyError::Degenerate);
            }
            if i + 1 < n {
                acc += jump.max(0.0);
            } else {
                acc += jump.max(0.0);
                if (acc - TAU).abs() > 1e-6 {
                    return Err(BodyError::Turning(acc));
                }
            }
        }
        let mut cum_len = vec![0.0];
        for p in &pieces {
            cum_len.push(cum_len.last().unwrap() + p.length());
        }
        let perimeter = *cum_len.last().unwrap();
        let mut m = [0.0; 3];
        for p in &pieces {
            let g = p.green_moments();
            for k in 0..3 {
                m[k] += g[k];
            }
        }
        let area = 0.5 * m[0];
        if !(area > 1e-14 * scale * scale) {
            return Err(BodyError::Degenerate);
        }
        let centroid = Vec2::new(m[1] / (2.0 * area), -m[2] / (2.0 * area));
        Ok(ConvexBody {
            kind,
            pieces,
            vertices: Vec::new(),
            cum_len,
            rel_start,
            rel_end,
            tan0,
            perimeter,
            area,
            centroid,
        })
    }

    pub fn kind(&self) -> BodyKind {
        self.kind
    }

    pub fn is_polygon(&self) -> bool {
        self.kind == BodyKind::Polygon
    }

    /// Polygon vertices (empty for arc bodies).
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn centroid(&self) -> Vec2 {
        self.centroid
    }

    pub fn transformed(&self, m: &Similarity) -> ConvexBody {
        let flip = m.det() < 0.0;
        if self.is_polygon() {
            let mut v: Vec<Vec2> = self.vertices.iter().map(|&p| m.apply(p)).collect();
            if flip {
                v.reverse();
            }
            return ConvexBody::polygon(&v).expect("similarity preserves validity");
        }
        let mut pieces: Vec<Piece> = self.pieces.iter().map(|p| p.transformed(m)).collect();
        if flip {
            pieces = pieces.iter().rev().map(|p| p.reversed()).collect();
        }
        ConvexBody::from_pieces(pieces).expect("similarity preserves validity")
    }

    pub fn rotated(&self, theta: f64) -> ConvexBody {
        self.transformed(&Similarity::rotation(theta))
    }

    pub fn scaled(&self, s: f64) -> ConvexBody {
        self.transformed(&Similarity::scaling(s))
    }

    pub fn translated(&self, v: Vec2) -> ConvexBody {
        self.transformed(&Similarity::translation(v))
    }

    /// Rescaled to diameter `diam` with centroid moved to `center`.
    pub fn normalized(&self, diam: f64, center: Vec2) -> ConvexBody {
        let (l, _) = self.diameters();
        let c = self.centroid;
        let m = Similarity::translation(center)
            .compose(&Similarity::scaling(diam / l))
            .compose(&Similarity::translation(-c));
        self.transformed(&m)
    }

    pub fn point(&self, pos: BoundaryPos) -> Vec2 {
        self.pieces[pos.piece].point(pos.t)
    }

    /// Arc-length coordinate of a boundary position, in `[0, |∂C|)`.
    pub fn arclen_of(&self, pos: BoundaryPos) -> f64 {
        let s = self.cum_len[pos.piece] + self.pieces[pos.piece].arclen(pos.t);
        if s >= self.perimeter {
            s - self.perimeter
        } else {
            s
        }
    }

    /// Boundary position at arc length `s` (taken modulo the perimeter).
    pub fn pos_at_arclen(&self, s: f64) -> BoundaryPos {
        let s = s.rem_euclid(self.perimeter);
        let i = match self.cum_len.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(self.pieces.len() - 1),
            Err(i) => i - 1,
        };
        let local = s - self.cum_len[i];
        BoundaryPos { piece: i, t: self.pieces[i].t_at_arclen(local) }
    }

    /// Cumulative arc length at the start of each piece (length `n + 1`).
    pub fn piece_offsets(&self) -> &[f64] {
        &self.cum_len
    }

    /// Normal angle (direction θ whose minimum is attained here) at a smooth point.
    pub(crate) fn normal_at(&self, pos: BoundaryPos) -> f64 {
        normalize_angle(self.tan0 + self.rel_start[pos.piece] + self.pieces[pos.piece].turn_at(pos.t) + FRAC_PI_2)
    }

    /// Normal interval `[ν⁻, ν⁺]` at the joint where piece `i` starts.
    pub(crate) fn joint_normals(&self, i: usize) -> (f64, f64) {
        let n = self.pieces.len();
        let prev = (i + n - 1) % n;
        let lo = self.tan0 + self.rel_end[prev] + FRAC_PI_2;
        let hi = self.tan0 + if i == 0 { TAU } else { self.rel_start[i] } + FRAC_PI_2;
        (lo, hi)
    }

    /// Angular jump at the joint where piece `i` starts.
    pub(crate) fn joint_jump(&self, i: usize) -> f64 {
        let (lo, hi) = self.joint_normals(i);
        hi - lo
    }

    pub(crate) fn is_angular_joint(&self, i: usize) -> bool {
        self.joint_jump(i) > ANGULAR_TOL
    }

    /// Normal range `[lo, hi]` (unwrapped, `lo ≤ hi`) swept by the smooth part of piece `i`.
    pub(crate) fn piece_normals(&self, i: usize) -> (f64, f64) {
        (self.tan0 + self.rel_start[i] + FRAC_PI_2, self.tan0 + self.rel_end[i] + FRAC_PI_2)
    }

    /// The supporting set minimising `x·u(θ)`, as first and last boundary positions
    /// (counterclockwise). They coincide unless a segment is supporting.
    pub fn argmin(&self, theta: f64) -> (BoundaryPos, BoundaryPos) {
        const TOL: f64 = 1e-12;
        let n = self.pieces.len();
        let mut r = (theta - FRAC_PI_2 - self.tan0).rem_euclid(TAU);
        if r > TAU - TOL {
            r -= TAU;
        }
        // locate by binary search on piece starts
        let i = match self.rel_start.binary_search_by(|c| c.total_cmp(&r)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        // a supporting segment may sit just before or after the located index
        for j in [i, (i + 1) % n, (i + n - 1) % n] {
            let p = &self.pieces[j];
            if p.is_segment() && (wrap_pm(r - self.rel_start[j])).abs() <= TOL {
                return (BoundaryPos { piece: j, t: 0.0 }, BoundaryPos { piece: j, t: 1.0 });
            }
        }
        let p = &self.pieces[i];
        if !p.is_segment() && r >= self.rel_start[i] - TOL && r <= self.rel_end[i] + TOL {
            let t = p.t_at_turn(r - self.rel_start[i]);
            let pos = BoundaryPos { piece: i, t };
            return (pos, pos);
        }
        if r < self.rel_start[i] {
            let pos = BoundaryPos { piece: i, t: 0.0 };
            return (pos, pos);
        }
        // in the joint gap after piece i
        let pos = BoundaryPos { piece: (i + 1) % n, t: 0.0 };
        (pos, pos)
    }

    /// `min_{x ∈ C} x·u(θ)`.
    pub fn min_dot(&self, theta: f64) -> f64 {
        let (lo, _) = self.argmin(theta);
        self.point(lo).dot(Vec2::unit(theta))
    }

    /// Support function `max_{x ∈ C} x·u(θ)`.
    pub fn support(&self, theta: f64) -> f64 {
        -self.min_dot(theta + std::f64::consts::PI)
    }

    /// Width of the body in direction `u(θ)`.
    pub fn width(&self, theta: f64) -> f64 {
        self.support(theta) - self.min_dot(theta)
    }

    /// Content hash of the boundary description, stable across runs.
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv(0xcbf29ce484222325);
        format!("{:?}", self.to_spec()).hash(&mut h);
        h.0
    }

    pub fn to_spec(&self) -> BodySpec {
        if self.is_polygon() {
            return BodySpec::Polygon { vertices: self.vertices.iter().map(|&v| v.into()).collect() };
        }
        let arcs = self
            .pieces
            .iter()
            .map(|p| match *p {
                Piece::Segment { a, b } => PieceSpec::Line { from: a.into(), to: b.into() },
                Piece::Circular { center, radius, start, sweep } => {
                    PieceSpec::Circular { center: center.into(), radius, start, sweep }
                }
                Piece::Power(a) => PieceSpec::Power {
                    origin: a.origin.into(),
                    e1: a.e1.into(),
                    e2: a.e2.into(),
                    coef: a.coef,
                    alpha: a.alpha,
                    x0: a.x0,
                    x1: a.x1,
                },
            })
            .collect();
        BodySpec::Arcs { arcs }
    }

    pub fn from_spec(spec: &BodySpec) -> Result<Self, BodyError> {
        match spec {
            BodySpec::Polygon { vertices } => {
                let v: Vec<Vec2> = vertices.iter().map(|&p| p.into()).collect();
                ConvexBody::polygon(&v)
            }
            BodySpec::Arcs { arcs } => {
                let mut pieces = Vec::new();
                for a in arcs {
                    match *a {
                        PieceSpec::Line { from, to } => pieces.push(Piece::Segment { a: from.into(), b: to.into() }),
                        PieceSpec::Circular { center, radius, start, sweep } => {
                            if !(radius > 0.0) {
                                return Err(BodyError::Spec("circular arc needs radius > 0".into()));
                            }
                            pieces.push(Piece::Circular { center: center.into(), radius, start, sweep })
                        }
                        PieceSpec::Power { origin, e1, e2, coef, alpha, x0, x1 } => {
                            if !(alpha > 1.0) || x0 < 0.0 || x1 < 0.0 {
                                return Err(BodyError::Spec("power arc needs alpha > 1 and x ≥ 0".into()));
                            }
                            pieces.push(Piece::Power(PowerArc {
                                origin: origin.into(),
                                e1: e1.into(),
                                e2: e2.into(),
                                coef,
                                alpha,
                                x0,
                                x1,
                            }))
                        }
                        PieceSpec::Sampled { ref points } => {
                            for w in points.windows(2) {
                                pieces.push(Piece::Segment { a: w[0].into(), b: w[1].into() });
                            }
                        }
                    }
                }
                ConvexBody::from_pieces(pieces)
            }
        }
    }

    pub fn from_json(s: &str) -> Result<Self, BodyError> {
        let spec: BodySpec = serde_json::from_str(s).map_err(|e| BodyError::Spec(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("body spec serializes")
    }
}

struct Fnv(u64);

impl Hasher for Fnv {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= *b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }
}

/// JSON description of a body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BodySpec {
    Polygon { vertices: Vec<[f64; 2]> },
    Arcs { arcs: Vec<PieceSpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum PieceSpec {
    Line {
        from: [f64; 2],
        to: [f64; 2],
    },
    Circular {
        center: [f64; 2],
        radius: f64,
        start: f64,
        sweep: f64,
    },
    Power {
        origin: [f64; 2],
        e1: [f64; 2],
        e2: [f64; 2],
        coef: f64,
        alpha: f64,
        x0: f64,
        x1: f64,
    },
    /// Polyline through the given points, taken as consecutive segments.
    Sampled {
        points: Vec<[f64; 2]>,
    },
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square() -> ConvexBody {
        ConvexBody::polygon(&[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(0.0, 1.0)])
            .unwrap()
    }

    #[test]
    fn square_area_perimeter_centroid() {
        let s = unit_square();
        assert!((s.area() - 1.0).abs() < 1e-14);
        assert!((s.perimeter() - 4.0).abs() < 1e-14);
        assert!((s.centroid() - Vec2::new(0.5, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn clockwise_polygon_rejected() {
        let r = ConvexBody::polygon(&[Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 1.0), Vec2::new(1.0, 0.0)]);
        assert!(r.is_err());
        let r = ConvexBody::polygon(&[
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 0.2),
            Vec2::new(2.0, 1.0),
            Vec2::new(0.0, 1.0),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn disc_from_json() {
        let b = ConvexBody::from_json(
            r#"{"kind":"arcs","arcs":[{"type":"circular","center":[0,0],"radius":1,"start":0,"sweep":6.283185307179586}]}"#,
        )
        .unwrap();
        assert!((b.area() - PI).abs() < 1e-12);
        assert!((b.support(0.3) - 1.0).abs() < 1e-12);
        let again = ConvexBody::from_json(&b.to_json()).unwrap();
        assert_eq!(again.content_hash(), b.content_hash());
    }

    #[test]
    fn support_examples() {
        let s = unit_square();
        assert!((s.support(0.0) - 1.0).abs() < 1e-15);
        assert!((s.support(PI / 4.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.min_dot(PI / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn argmin_detects_supporting_edge() {
        let s = unit_square();
        let (lo, hi) = s.argmin(0.0);
        assert_eq!(lo.piece, hi.piece);
        assert!((s.point(lo) - Vec2::new(0.0, 1.0)).norm() < 1e-15);
        assert!((s.point(hi) - Vec2::new(0.0, 0.0)).norm() < 1e-15);
        let (lo, hi) = s.argmin(0.3);
        assert_eq!(lo, hi);
        assert!(s.point(lo).norm() < 1e-15);
    }
}
