use serde::Serialize;

use super::parseval::exp_sum_sq_grid;
use super::PointSet;
use crate::geometry::Vec2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CasselsReport {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Count of integers `j` with `|j| < u`.
fn open_count(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        2.0 * u.ceil() - 1.0
    }
}

/// Checks `Σ_{m ∈ (Ω∖U) ∩ Z²} |S(m)|² ≥ |Ω| N / 4 − c_U N²` for the rectangle
/// `Ω = [−M₁, M₁] × [−M₂, M₂]` and the open box `U = (−u₁, u₁) × (−u₂, u₂)`.
pub fn cassels_montgomery_check(points: &PointSet, omega_half: Vec2, u_half: Vec2) -> CasselsReport {
    let (m1, m2) = (omega_half.x.floor() as i64, omega_half.y.floor() as i64);
    let grid = exp_sum_sq_grid(points, m1, m2);
    let mut lhs = 0.0;
    for (j, row) in grid.iter().enumerate() {
        let b = j as i64 - m2;
        for (i, v) in row.iter().enumerate() {
            let a = i as i64 - m1;
            let in_u = (a as f64).abs() < u_half.x && (b as f64).abs() < u_half.y;
            if !in_u {
                lhs += v;
            }
        }
    }
    let n = points.len() as f64;
    let area = 4.0 * omega_half.x * omega_half.y;
    let c_u = open_count(u_half.x) * open_count(u_half.y);
    let rhs = area * n / 4.0 - c_u * n * n;
    CasselsReport { lhs, rhs, pass: lhs >= rhs * (1.0 - 1e-12) - 1e-9 }
}
