use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;

/// Known algebraic structure of a point set, enabling closed-form exponential sums.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    Generic,
    /// Points `(q2ℓ/L − q1g/G, q1ℓ/L + q2g/G)`, `0 ≤ ℓ < L`, `0 ≤ g < G`.
    Sublattice { q1: i64, q2: i64, l: i64, g: i64 },
    /// Points `(ℓ/L, g/G)`.
    Product { l: i64, g: i64 },
    /// Union of structured blocks plus `leftover` points at the origin.
    Composite { blocks: Vec<Structure>, leftover: usize },
}

impl Structure {
    /// Closed-form `Σ_p e^{2πi m·p}` for the unshifted set, if available.
    pub fn exp_sum(&self, m: (i64, i64)) -> Option<f64> {
        let (m1, m2) = m;
        match *self {
            Structure::Generic => None,
            Structure::Product { l, g } => Some(if m1 % l == 0 && m2 % g == 0 { (l * g) as f64 } else { 0.0 }),
            Structure::Sublattice { q1, q2, l, g } => {
                let hit = (q2 * m1 + q1 * m2) % l == 0 && (q2 * m2 - q1 * m1) % g == 0;
                Some(if hit { (l * g) as f64 } else { 0.0 })
            }
            Structure::Composite { ref blocks, leftover } => {
                let mut s = leftover as f64;
                for b in blocks {
                    s += b.exp_sum(m)?;
                }
                Some(s)
            }
        }
    }

    /// Number of points.
    pub fn count(&self) -> Option<usize> {
        match *self {
            Structure::Generic => None,
            Structure::Product { l, g } | Structure::Sublattice { l, g, .. } => Some((l * g) as usize),
            Structure::Composite { ref blocks, leftover } => {
                let mut n = leftover;
                for b in blocks {
                    n += b.count()?;
                }
                Some(n)
            }
        }
    }

    /// Whether `m` lies in the lattice carrying the nonzero exponential sums.
    /// Composite sets with leftover points are supported everywhere.
    pub fn in_support(&self, m: (i64, i64)) -> bool {
        self.exp_sum(m).map(|s| s != 0.0).unwrap_or(true)
    }

    /// A reduced basis of the frequency support lattice (successive minima).
    pub fn support_basis(&self) -> [(i64, i64); 2] {
        match *self {
            Structure::Generic | Structure::Composite { .. } => [(1, 0), (0, 1)],
            Structure::Product { l, g } => {
                if l <= g {
                    [(l, 0), (0, g)]
                } else {
                    [(0, g), (l, 0)]
                }
            }
            Structure::Sublattice { .. } => {
                let mut r: i64 = 1;
                loop {
                    let mut pts: Vec<(i64, i64)> = Vec::new();
                    for a in -r..=r {
                        for b in -r..=r {
                            if (a, b) != (0, 0) && self.in_support((a, b)) {
                                pts.push((a, b));
                            }
                        }
                    }
                    let n2 = |v: &(i64, i64)| v.0 * v.0 + v.1 * v.1;
                    pts.sort_by_key(n2);
                    if let Some(&v1) = pts.first() {
                        if let Some(&v2) = pts.iter().find(|w| v1.0 * w.1 - v1.1 * w.0 != 0) {
                            if (n2(&v2) as f64).sqrt() <= r as f64 {
                                return [v1, v2];
                            }
                        }
                    }
                    r *= 2;
                }
            }
        }
    }

    /// Covolume of the frequency support lattice.
    pub fn support_covolume(&self) -> f64 {
        let [a, b] = self.support_basis();
        (a.0 * b.1 - a.1 * b.0).abs() as f64
    }
}

/// `N` points on the unit torus, with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<Vec2>,
    structure: Structure,
    /// Common translation applied since construction.
    shift: Vec2,
    /// Points before translation; moduli of exponential sums are taken from these.
    base: Option<Vec<Vec2>>,
}

pub(crate) fn reduce(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PointSetError {
    #[error("point set is empty")]
    Empty,
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("structure describes {expected} points, got {got}")]
    Count { expected: usize, got: usize },
    #[error("invalid point set file: {0}")]
    Parse(String),
}

impl PointSet {
    pub fn new(points: Vec<Vec2>, structure: Structure) -> Result<Self, PointSetError> {
        if points.is_empty() {
            return Err(PointSetError::Empty);
        }
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(PointSetError::NonFinite(i));
        }
        if let Some(n) = structure.count() {
            if n != points.len() {
                return Err(PointSetError::Count { expected: n, got: points.len() });
            }
        }
        let points = points.into_iter().map(|p| Vec2::new(reduce(p.x), reduce(p.y))).collect();
        Ok(PointSet { points, structure, shift: Vec2::ZERO, base: None })
    }

    pub fn generic(points: Vec<Vec2>) -> Result<Self, PointSetError> {
        Self::new(points, Structure::Generic)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub(crate) fn base_points(&self) -> &[Vec2] {
        self.base.as_deref().unwrap_or(&self.points)
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    /// The same points with the structure tag dropped.
    pub fn as_generic(&self) -> PointSet {
        PointSet { points: self.points.clone(), structure: Structure::Generic, shift: Vec2::ZERO, base: None }
    }

    /// All points translated by `v` (mod 1); structure is kept.
    pub fn translated(&self, v: Vec2) -> PointSet {
        PointSet {
            points: self.points.iter().map(|p| Vec2::new(reduce(p.x + v.x), reduce(p.y + v.y))).collect(),
            structure: self.structure.clone(),
            shift: self.shift + v,
            base: Some(self.base_points().to_vec()),
        }
    }

    /// `Σ_p e^{2πi m·p}`.
    pub fn exp_sum(&self, m: (i64, i64)) -> Complex64 {
        if let Some(s) = self.structure.exp_sum(m) {
            let phase = TAU * (m.0 as f64 * self.shift.x + m.1 as f64 * self.shift.y);
            return Complex64::from_polar(s, phase);
        }
        generic_exp_sum(&self.points, m)
    }

    /// `|Σ_p e^{2πi m·p}|²`; exact for structured sets.
    pub fn exp_sum_sq(&self, m: (i64, i64)) -> f64 {
        match self.structure.exp_sum(m) {
            Some(s) => s * s,
            None => generic_exp_sum(self.base_points(), m).norm_sqr(),
        }
    }

    /// CSV with a structure header line.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# structure={}\n", serde_json::to_string(&self.structure).expect("serializable"));
        out.push_str("x,y\n");
        for p in &self.points {
            out.push_str(&format!("{:.17},{:.17}\n", p.x, p.y));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, PointSetError> {
        let mut structure = Structure::Generic;
        for line in text.lines().filter(|l| l.starts_with('#')) {
            if let Some(s) = line.trim_start_matches('#').trim().strip_prefix("structure=") {
                structure = serde_json::from_str(s).map_err(|e| PointSetError::Parse(e.to_string()))?;
            }
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let mut pts = Vec::new();
        for rec in rdr.deserialize() {
            let (x, y): (f64, f64) = rec.map_err(|e| PointSetError::Parse(e.to_string()))?;
            pts.push(Vec2::new(x, y));
        }
        Self::new(pts, structure)
    }
}

pub(crate) fn generic_exp_sum(points: &[Vec2], m: (i64, i64)) -> Complex64 {
    let (a, b) = (m.0 as f64, m.1 as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in points {
        acc += Complex64::from_polar(1.0, TAU * (a * p.x + b * p.y));
    }
    acc
}
