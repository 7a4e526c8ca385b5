use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::geometry::{BodyError, ConvexBody, Piece, Vec2};

const NODES: usize = 16;
/// Taylor moments kept per panel for small phase.
const TAYLOR: usize = 64;
const END_LEVELS: usize = 30;
const JOINT_LEVELS: usize = 16;
/// Below this phase the moments come from the Taylor table, above from the recurrence.
const KAPPA_SWITCH: f64 = 8.0;

struct ChebData {
    nodes: [f64; NODES],
    /// `to_mono[k][m]`: weight of the value at node `m` in the `x^k` coefficient.
    to_mono: [[f64; NODES]; NODES],
}

fn cheb() -> &'static ChebData {
    static DATA: OnceLock<ChebData> = OnceLock::new();
    DATA.get_or_init(|| {
        let mut nodes = [0.0; NODES];
        for (m, x) in nodes.iter_mut().enumerate() {
            *x = (PI * (m as f64 + 0.5) / NODES as f64).cos();
        }
        let mut mono = [[0.0; NODES]; NODES];
        mono[0][0] = 1.0;
        mono[1][1] = 1.0;
        for j in 2..NODES {
            for k in 0..NODES {
                let up = if k > 0 { 2.0 * mono[j - 1][k - 1] } else { 0.0 };
                mono[j][k] = up - mono[j - 2][k];
            }
        }
        let mut to_mono = [[0.0; NODES]; NODES];
        for j in 0..NODES {
            let scale = if j == 0 { 1.0 } else { 2.0 } / NODES as f64;
            for m in 0..NODES {
                let c = scale * (PI * j as f64 * (m as f64 + 0.5) / NODES as f64).cos();
                for k in 0..NODES {
                    to_mono[k][m] += c * mono[j][k];
                }
            }
        }
        ChebData { nodes, to_mono }
    })
}

#[derive(Debug, Clone)]
struct Panel {
    center: f64,
    half: f64,
    /// Monomial coefficients of the interpolant in `x = (t - center)/half`.
    coef: [f64; NODES],
    /// `∫_{-1}^{1} p(x) x^j dx`.
    taylor: Vec<f64>,
}

impl Panel {
    fn new<F: FnMut(f64) -> f64>(lo: f64, hi: f64, g: &mut F) -> Panel {
        let data = cheb();
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let vals = data.nodes.map(|x| g(center + half * x));
        let coef = data.to_mono.map(|row| row.iter().zip(&vals).map(|(w, v)| w * v).sum());
        let taylor = (0..TAYLOR)
            .map(|j| {
                coef.iter()
                    .enumerate()
                    .filter(|(k, _)| (k + j) % 2 == 0)
                    .map(|(k, c)| c * 2.0 / (k + j + 1) as f64)
                    .sum()
            })
            .collect();
        Panel { center, half, coef, taylor }
    }

    fn eval(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.half;
        self.coef.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `∫ p(t) e^{-2πiρt} dt` over the panel.
    fn oscillatory(&self, rho: f64) -> Complex64 {
        let kappa = 2.0 * PI * rho * self.half;
        let inner = if kappa.abs() < KAPPA_SWITCH {
            // Σ_j (-iκ)^j/j! ∫ p x^j
            let mut term = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, m) in self.taylor.iter().enumerate() {
                if j > 0 {
                    term *= Complex64::new(0.0, -kappa / j as f64);
                }
                acc += term * *m;
                if j > 8 && term.norm() < 1e-18 {
                    break;
                }
            }
            acc
        } else {
            // μ_k = (e^{-iκ} - (-1)^k e^{iκ})/(-iκ) + (k/(iκ)) μ_{k-1}
            let e_m = Complex64::from_polar(1.0, -kappa);
            let e_p = e_m.conj();
            let inv = Complex64::new(0.0, 1.0 / kappa); // 1/(-iκ)
            let mut mu = Complex64::new(2.0 * kappa.sin() / kappa, 0.0);
            let mut acc = mu * self.coef[0];
            let mut sign = 1.0;
            for k in 1..NODES {
                sign = -sign;
                mu = (e_m - e_p * sign) * inv - inv * (k as f64) * mu;
                acc += mu * self.coef[k];
            }
            acc
        };
        Complex64::from_polar(self.half, -2.0 * PI * rho * self.center) * inner
    }
}

/// The chord-length profile `g(t) = |{x ∈ C : x·u(θ) = t}|` on `[a, b]`,
/// stored as piecewise polynomial interpolants on panels graded toward
/// the ends and the projections of boundary joints.
#[derive(Debug, Clone)]
pub struct Profile {
    pub theta: f64,
    pub a: f64,
    pub b: f64,
    panels: Vec<Panel>,
}

// joints inside one split circle are smooth and need no grading
fn same_circle(p: &Piece, q: &Piece) -> bool {
    match (p, q) {
        (Piece::Circular { center: c1, radius: r1, .. }, Piece::Circular { center: c2, radius: r2, .. }) => {
            (*c1 - *c2).norm() <= 1e-12 * r1 && (r1 - r2).abs() <= 1e-12 * r1
        }
        _ => false,
    }
}

fn graded(lo: f64, hi: f64, grade_lo: usize, grade_hi: usize, out: &mut Vec<(f64, f64)>) {
    if grade_lo == 0 && grade_hi == 0 {
        out.push((lo, hi));
        return;
    }
    let mid = 0.5 * (lo + hi);
    let h = mid - lo;
    out.push((lo, lo + h * 0.5f64.powi(grade_lo as i32)));
    for k in (0..grade_lo).rev() {
        out.push((lo + h * 0.5f64.powi(k as i32 + 1), lo + h * 0.5f64.powi(k as i32)));
    }
    for k in 0..grade_hi {
        out.push((hi - h * 0.5f64.powi(k as i32), hi - h * 0.5f64.powi(k as i32 + 1)));
    }
    out.push((hi - h * 0.5f64.powi(grade_hi as i32), hi));
}

impl Profile {
    pub fn new(body: &ConvexBody, theta: f64) -> Result<Profile, BodyError> {
        let u = Vec2::unit(theta);
        let a = body.min_dot(theta);
        let b = body.support(theta);
        let w = b - a;
        let pieces = body.pieces();
        let mut cuts: Vec<f64> = (0..pieces.len())
            .filter(|&i| !same_circle(&pieces[(i + pieces.len() - 1) % pieces.len()], &pieces[i]))
            .map(|i| pieces[i].start_point().dot(u))
            .filter(|&t| t > a + 1e-12 * w && t < b - 1e-12 * w)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * w);
        let mut knots = vec![a];
        knots.extend(cuts);
        knots.push(b);
        let polygon = body.is_polygon();
        let mut spans = Vec::new();
        for (i, k) in knots.windows(2).enumerate() {
            let (gl, gh) = if polygon {
                (0, 0)
            } else {
                let gl = if i == 0 { END_LEVELS } else { JOINT_LEVELS };
                let gh = if i + 2 == knots.len() { END_LEVELS } else { JOINT_LEVELS };
                (gl, gh)
            };
            graded(k[0], k[1], gl, gh, &mut spans);
        }
        let mut err = None;
        let mut g = |t: f64| match body.chord_length(theta, (t - a).clamp(0.0, w)) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        };
        let panels: Vec<Panel> =
            spans.into_iter().filter(|(lo, hi)| hi > lo).map(|(lo, hi)| Panel::new(lo, hi, &mut g)).collect();
        if let Some(e) = err {
            return Err(e);
        }
        Ok(Profile { theta, a, b, panels })
    }

    /// Interpolated chord length at level `t`; zero outside `[a, b]`.
    pub fn g(&self, t: f64) -> f64 {
        if t < self.a || t > self.b {
            return 0.0;
        }
        let i = self.panels.partition_point(|p| p.center + p.half < t).min(self.panels.len() - 1);
        self.panels[i].eval(t)
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// `∫ g(t) e^{-2πiρt} dt`, the transform of the body at `ρ u(θ)`.
    pub fn ft(&self, rho: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in &self.panels {
            acc += p.oscillatory(rho);
        }
        acc
    }
}

/// Transform of the body at `ρ u(θ)` through its profile.
pub fn ft_profile(body: &ConvexBody, theta: f64, rho: f64) -> Result<Complex64, BodyError> {
    Ok(Profile::new(body, theta)?.ft(rho))
}
