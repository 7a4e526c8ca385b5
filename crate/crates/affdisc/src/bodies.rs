//! Constructors for the standard bodies and the intermediate-order bodies
//! `H(φ, α)`, `C(φ, α)`, plus closed-form chord oracles for `F(α)` and `G(α)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::geometry::{BodyError, ConvexBody, Piece, PowerArc, Similarity, Vec2};
use crate::quad;

pub fn disc(center: Vec2, radius: f64) -> ConvexBody {
    ConvexBody::from_pieces(vec![Piece::Circular { center, radius, start: -FRAC_PI_2, sweep: TAU }])
        .expect("disc is valid")
}

/// Axis-parallel rectangle `[0, w] × [0, h]`.
pub fn rectangle(w: f64, h: f64) -> ConvexBody {
    ConvexBody::polygon(&[Vec2::new(0.0, 0.0), Vec2::new(w, 0.0), Vec2::new(w, h), Vec2::new(0.0, h)])
        .expect("rectangle is valid")
}

/// Axis-parallel square `[-s/2, s/2]²`.
pub fn centered_square(side: f64) -> ConvexBody {
    rectangle(side, side).translated(Vec2::new(-0.5 * side, -0.5 * side))
}

/// Regular polygon centred at the origin with a horizontal bottom edge.
pub fn regular_polygon(n_sides: usize, circumradius: f64) -> Result<ConvexBody, BodyError> {
    if n_sides < 3 {
        return Err(BodyError::TooFewPieces(3));
    }
    let off = -FRAC_PI_2 + PI / n_sides as f64;
    let v: Vec<Vec2> =
        (0..n_sides).map(|k| Vec2::unit(off + TAU * k as f64 / n_sides as f64) * circumradius).collect();
    ConvexBody::polygon(&v)
}

/// Parameters of `H(φ, α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntermediateBodySpec {
    pub phi: f64,
    pub alpha: f64,
    /// Extent of the power arc before rescaling.
    pub eps: f64,
    /// Radius of the circular closure arc before rescaling.
    pub closure_radius: f64,
    /// Diameter after rescaling.
    pub diameter: f64,
}

impl IntermediateBodySpec {
    pub fn new(phi: f64, alpha: f64) -> Self {
        IntermediateBodySpec { phi, alpha, eps: 0.1, closure_radius: 0.5, diameter: 0.8 }
    }

    /// Turning of the circular closure arc; must be positive.
    pub fn closure_turn(&self) -> f64 {
        PI - self.phi - 2.0 * (self.alpha * self.eps.powf(self.alpha - 1.0)).atan()
    }
}

/// `H(φ, α)`: corner at the origin with normal set `[π/2 − φ, π/2]`, the power arc
/// `y = c·x^α` leaving the corner along the positive x-axis, symmetric about the
/// line through the origin at angle `π/2 − φ/2` and centrally symmetric.
pub fn make_h(spec: &IntermediateBodySpec) -> Result<ConvexBody, BodyError> {
    let IntermediateBodySpec { phi, alpha, eps, closure_radius: r, diameter } = *spec;
    if !(phi > 0.0 && phi < PI) || !(alpha > 1.0) || !(eps > 0.0) || !(r > 0.0) || !(diameter > 0.0) {
        return Err(BodyError::Spec(format!("invalid intermediate body parameters {spec:?}")));
    }
    let dk = spec.closure_turn();
    if dk <= 0.0 {
        return Err(BodyError::NotConvex(format!("closure arc would turn by {dk}")));
    }
    let arc = Piece::Power(PowerArc {
        origin: Vec2::ZERO,
        e1: Vec2::new(1.0, 0.0),
        e2: Vec2::new(0.0, 1.0),
        coef: 1.0,
        alpha,
        x0: 0.0,
        x1: eps,
    });
    let p = arc.end_point();
    let tp = arc.tangent_angle(1.0);
    let z = p + Vec2::unit(tp).perp() * r;
    let closure = Piece::Circular { center: z, radius: r, start: tp - FRAC_PI_2, sweep: dk };
    let d = Vec2::unit(FRAC_PI_2 - 0.5 * phi);
    let c = d * z.dot(d);
    // reflection across the line through c orthogonal to d
    let rd = Similarity::reflection(FRAC_PI_2 - 0.5 * phi);
    let mut m = Similarity::translation(c * 2.0);
    m = m.compose(&Similarity { q: [[-rd.q[0][0], -rd.q[0][1]], [-rd.q[1][0], -rd.q[1][1]]], ..rd });
    let mirrored = arc.transformed(&m).reversed();
    let half = [arc, closure, mirrored];
    let point_reflection = Similarity::translation(c * 2.0).compose(&Similarity::rotation(PI));
    let mut pieces: Vec<Piece> = half.to_vec();
    pieces.extend(half.iter().map(|q| q.transformed(&point_reflection)));
    let raw = ConvexBody::from_pieces(pieces)?;
    let (l, _) = raw.diameters();
    Ok(raw.scaled(diameter / l))
}

/// `C(φ, α)`: `H(φ, α)` rotated by `φ/2 − π/2`, so its corner normal set is `[−φ/2, φ/2]`.
pub fn make_c(spec: &IntermediateBodySpec) -> Result<ConvexBody, BodyError> {
    Ok(make_h(spec)?.rotated(0.5 * spec.phi - FRAC_PI_2))
}

/// Coefficient `c` of the power arc `y = c·x^α` on a body built by [`make_h`].
pub fn h_power_coef(body: &ConvexBody) -> Option<f64> {
    body.pieces().iter().find_map(|p| match p {
        Piece::Power(a) if a.origin.norm() < 1e-12 => Some(a.coef),
        _ => None,
    })
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("root finder failed for {0}")]
    RootFinder(String),
    #[error("parameter out of range: {0}")]
    Range(String),
}

/// Chord of `F(α) = {x ≥ 0, y ≥ x^α}` in direction `u(θ)` at depth `1/ρ`, for
/// `θ ∈ (0, π/2]` (the chord then runs from the y-axis to the power curve).
pub fn f_alpha_chord_oracle(alpha: f64, theta: f64, rho: f64) -> Result<f64, OracleError> {
    if !(alpha > 1.0) || !(rho > 0.0) || !(theta > 0.0 && theta <= FRAC_PI_2 + 1e-15) {
        return Err(OracleError::Range(format!("alpha={alpha}, theta={theta}, rho={rho}")));
    }
    let (s, c) = theta.sin_cos();
    let lam = 1.0 / rho;
    let g = |x: f64| x * (x.powf(alpha - 1.0) * s + c.max(0.0)) - lam;
    // both bounds make g nonnegative
    let mut hi = (lam / s).powf(1.0 / alpha);
    if c > 0.0 {
        hi = hi.min(lam / c);
    }
    let x = quad::brent(g, 0.0, hi, 1e-16 * hi.max(1e-300))
        .ok_or_else(|| OracleError::RootFinder(format!("F chord at theta={theta}")))?;
    let y_axis = Vec2::new(0.0, lam / s);
    let on_curve = Vec2::new(x, x.powf(alpha));
    Ok((on_curve - y_axis).norm())
}

/// `f(z) = |z + 1|^α − αz − 1`.
pub fn tangent_excess(alpha: f64, z: f64) -> f64 {
    (z + 1.0).abs().powf(alpha) - alpha * z - 1.0
}

/// Solve `f(z) = y` on one side of the minimum: `positive` selects `z > 0`.
pub fn invert_tangent_excess(alpha: f64, y: f64, positive: bool) -> Result<f64, OracleError> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let g = |z: f64| tangent_excess(alpha, z) - y;
    let mut b = if positive { 1.0 } else { -1.0 };
    while g(b) < 0.0 {
        b *= 2.0;
        if b.abs() > 1e300 {
            return Err(OracleError::RootFinder(format!("f(z) = {y}")));
        }
    }
    quad::brent(g, 0.0, b, 1e-15 * b.abs().max(1.0)).ok_or_else(|| OracleError::RootFinder(format!("f(z) = {y}")))
}

/// Chord and semi-chords `(total, left, right)` of `G(α) = {y ≥ |x|^α}` in direction
/// `u(θ)`, `θ ∈ [π/2, π)`, at depth `1/ρ` above the supporting tangent line.
pub fn g_alpha_chord_oracle(alpha: f64, theta: f64, rho: f64) -> Result<(f64, f64, f64), OracleError> {
    if !(alpha > 1.0) || !(rho > 0.0) || !(theta >= FRAC_PI_2 && theta < PI) {
        return Err(OracleError::Range(format!("alpha={alpha}, theta={theta}, rho={rho}")));
    }
    let lam = 1.0 / rho;
    let beta = theta - FRAC_PI_2;
    if beta == 0.0 {
        let x = lam.powf(1.0 / alpha);
        return Ok((2.0 * x, x, x));
    }
    let (sb, cb) = beta.sin_cos();
    let xt = (sb / (cb * alpha)).powf(1.0 / (alpha - 1.0));
    let k = lam / (cb * xt.powf(alpha));
    let zp = invert_tangent_excess(alpha, k, true)?;
    let zm = invert_tangent_excess(alpha, k, false)?;
    let pt = |x: f64| Vec2::new(x, x.abs().powf(alpha));
    let t = pt(xt);
    let xp = pt(xt * (1.0 + zp));
    let xm = pt(xt * (1.0 + zm));
    let up = Vec2::unit(theta).perp();
    let total = (xm - xp).dot(up);
    let right = (t - xp).dot(up);
    Ok((total, total - right, right))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h_is_valid_and_centrally_symmetric() {
        let spec = IntermediateBodySpec::new(FRAC_PI_2, 2.0);
        let h = make_h(&spec).unwrap();
        let (l, _) = h.diameters();
        assert!((l - 0.8).abs() < 1e-6);
        for k in 0..16 {
            let th = 0.37 * k as f64;
            let c = h.centroid();
            let a = h.support(th) - c.dot(Vec2::unit(th));
            let b = h.support(th + PI) - c.dot(Vec2::unit(th + PI));
            assert!((a - b).abs() < 1e-9, "{a} {b}");
        }
    }

    #[test]
    fn closure_turn_must_be_positive() {
        let mut spec = IntermediateBodySpec::new(3.0, 2.0);
        spec.eps = 1.0;
        assert!(make_h(&spec).is_err());
    }

    #[test]
    fn g_oracle_symmetric_cut() {
        let (t, l, r) = g_alpha_chord_oracle(2.0, FRAC_PI_2, 1e4).unwrap();
        assert!((t - 0.02).abs() < 1e-15);
        assert_eq!(l, r);
    }

    #[test]
    fn f_oracle_horizontal_cut() {
        let v = f_alpha_chord_oracle(2.0, FRAC_PI_2, 1e4).unwrap();
        assert!((v - 1e-2).abs() < 1e-12);
        let v = f_alpha_chord_oracle(3.0, FRAC_PI_2, 1e6).unwrap();
        assert!((v - 1e-2).abs() < 1e-12);
    }
}
