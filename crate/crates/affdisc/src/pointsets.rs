//! Explicit point families: square lattices, rational rotations of
//! anisotropic grids, product grids and the greedy composition for arbitrary `N`.

use serde::{Deserialize, Serialize};

use crate::discrepancy::{PointSet, PointSetError, Structure};
use crate::geometry::Vec2;

/// `⌊n^e⌋`, snapping to the nearest integer when within rounding noise.
pub fn floor_pow(n: u64, e: f64) -> u64 {
    let v = (n as f64).powf(e);
    let r = v.round();
    if (v - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        v.floor() as u64
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// `k²` points `(h/k, j/k)`.
pub fn square_lattice(k: u64) -> Result<PointSet, PointSetError> {
    if k == 0 {
        return Err(PointSetError::Empty);
    }
    let k = k as i64;
    let pts = (0..k).flat_map(|h| (0..k).map(move |j| Vec2::new(h as f64 / k as f64, j as f64 / k as f64))).collect();
    PointSet::new(pts, Structure::Product { l: k, g: k })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedLatticeSpec {
    pub n: u64,
    pub q1: i64,
    pub q2: i64,
}

impl RotatedLatticeSpec {
    pub fn new(n: u64, q1: i64, q2: i64) -> Result<Self, PointSetError> {
        if n == 0 {
            return Err(PointSetError::Empty);
        }
        if gcd(q1, q2) != 1 {
            return Err(PointSetError::Parse(format!("q1={q1} and q2={q2} are not coprime")));
        }
        Ok(RotatedLatticeSpec { n, q1, q2 })
    }

    pub fn g(&self) -> u64 {
        floor_pow(self.n, 0.6)
    }

    pub fn l(&self) -> u64 {
        floor_pow(self.n, 0.4)
    }

    /// `arctan(q1/q2)`.
    pub fn omega_tilde(&self) -> f64 {
        (self.q1 as f64).atan2(self.q2 as f64)
    }
}

/// `G·L` points `(q2ℓ/L − q1g/G, q1ℓ/L + q2g/G)` mod 1.
pub fn rotated_lattice(spec: &RotatedLatticeSpec) -> Result<PointSet, PointSetError> {
    let (g, l) = (spec.g() as i64, spec.l() as i64);
    let (q1, q2) = (spec.q1, spec.q2);
    let mut pts = Vec::with_capacity((g * l) as usize);
    for a in 0..l {
        for b in 0..g {
            // exact rational arithmetic before the final division
            let x = (q2 * a * g - q1 * b * l).rem_euclid(l * g);
            let y = (q1 * a * g + q2 * b * l).rem_euclid(l * g);
            pts.push(Vec2::new(x as f64 / (l * g) as f64, y as f64 / (l * g) as f64));
        }
    }
    PointSet::new(pts, Structure::Sublattice { q1, q2, l, g })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropicLatticeSpec {
    pub n: u64,
    pub alpha: f64,
}

impl AnisotropicLatticeSpec {
    pub fn new(n: u64, alpha: f64) -> Result<Self, PointSetError> {
        if n == 0 || !(alpha > 1.0) {
            return Err(PointSetError::Parse(format!("need n ≥ 1 and alpha > 1, got n={n}, alpha={alpha}")));
        }
        Ok(AnisotropicLatticeSpec { n, alpha })
    }

    pub fn exponents(alpha: f64) -> (f64, f64) {
        ((1.0 + 2.0 * alpha) / (1.0 + 4.0 * alpha), 2.0 * alpha / (1.0 + 4.0 * alpha))
    }

    pub fn g(&self) -> u64 {
        floor_pow(self.n, Self::exponents(self.alpha).0).max(1)
    }

    pub fn l(&self) -> u64 {
        floor_pow(self.n, Self::exponents(self.alpha).1).max(1)
    }
}

/// `G·L` points `(ℓ/L, g/G)`.
pub fn anisotropic_lattice(spec: &AnisotropicLatticeSpec) -> Result<PointSet, PointSetError> {
    let (g, l) = (spec.g() as i64, spec.l() as i64);
    let pts = (0..l).flat_map(|a| (0..g).map(move |b| Vec2::new(a as f64 / l as f64, b as f64 / g as f64))).collect();
    PointSet::new(pts, Structure::Product { l, g })
}

/// Outcome of [`compose_general_n`].
#[derive(Debug, Clone)]
pub struct Composition {
    pub set: PointSet,
    pub block_params: Vec<u64>,
    pub block_sizes: Vec<u64>,
    pub leftover: u64,
}

/// Largest `n` with `⌊n^a⌋⌊n^b⌋ ≤ rem`.
pub fn largest_block_param(rem: u64, exps: (f64, f64)) -> u64 {
    let f = |n: u64| floor_pow(n, exps.0) * floor_pow(n, exps.1);
    let mut hi = 2 * rem + 8;
    while f(hi) <= rem {
        hi *= 2;
    }
    let mut lo = 1;
    if f(lo) > rem {
        return 0;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if f(mid) <= rem {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Greedy union of at most `max_blocks` blocks built from `n_j = max{n : ⌊n^a⌋⌊n^b⌋ ≤ remainder}`;
/// remaining points go to the origin.
pub fn compose_general_n<F>(total: u64, exps: (f64, f64), max_blocks: usize, build: F) -> Result<Composition, PointSetError>
where
    F: Fn(u64) -> Result<PointSet, PointSetError>,
{
    if total == 0 {
        return Err(PointSetError::Empty);
    }
    let mut rem = total;
    let mut pts = Vec::new();
    let mut blocks = Vec::new();
    let mut params = Vec::new();
    let mut sizes = Vec::new();
    while rem > 0 && blocks.len() < max_blocks {
        let n = largest_block_param(rem, exps);
        if n == 0 {
            break;
        }
        let b = build(n)?;
        let size = b.len() as u64;
        if size == 0 || size > rem {
            break;
        }
        pts.extend_from_slice(b.points());
        blocks.push(b.structure().clone());
        params.push(n);
        sizes.push(size);
        rem -= size;
    }
    pts.extend(std::iter::repeat_n(Vec2::ZERO, rem as usize));
    let set = PointSet::new(pts, Structure::Composite { blocks, leftover: rem as usize })?;
    Ok(Composition { set, block_params: params, block_sizes: sizes, leftover: rem })
}
