use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_table, D2Result, DiscrepancyError, Method, PointSet, Structure, GENERIC_BUDGET};
use crate::fourier::SpectralWeightTable;
use crate::geometry::{AngleInterval, ConvexBody};
use crate::quad::KahanSum;

const BLOCK: usize = 256;

/// `S(m1, m2)` for `|m1| ≤ m1max` and each `m2` in `rows`, by separable powers.
fn generic_rows(points: &[crate::geometry::Vec2], m1max: i64, rows: &[i64]) -> Vec<Vec<Complex64>> {
    let width = (2 * m1max + 1) as usize;
    let mut out = vec![vec![Complex64::new(0.0, 0.0); width]; rows.len()];
    for chunk in points.chunks(BLOCK) {
        let ex: Vec<Vec<Complex64>> = chunk
            .iter()
            .map(|p| (0..width).map(|i| Complex64::from_polar(1.0, TAU * (i as i64 - m1max) as f64 * p.x)).collect())
            .collect();
        out.par_iter_mut().zip(rows.par_iter()).for_each(|(row, &m2)| {
            for (p, e) in chunk.iter().zip(&ex) {
                let f = Complex64::from_polar(1.0, TAU * m2 as f64 * p.y);
                for (r, v) in row.iter_mut().zip(e) {
                    *r += f * v;
                }
            }
        });
    }
    out
}

/// `|S(m)|²` on `[−m1max, m1max] × [−m2max, m2max]`, rows indexed by `m2 + m2max`.
pub(crate) fn exp_sum_sq_grid(points: &PointSet, m1max: i64, m2max: i64) -> Vec<Vec<f64>> {
    let rows: Vec<i64> = (-m2max..=m2max).collect();
    if matches!(points.structure(), Structure::Generic) {
        return generic_rows(points.base_points(), m1max, &rows)
            .into_iter()
            .map(|r| r.into_iter().map(|v| v.norm_sqr()).collect())
            .collect();
    }
    rows.iter().map(|&b| (-m1max..=m1max).map(|a| points.exp_sum_sq((a, b))).collect()).collect()
}

/// Length of the longer vector of a reduced basis of the frequency support;
/// `√N` for unstructured sets.
pub fn frequency_scale(points: &PointSet) -> f64 {
    match points.structure() {
        Structure::Generic | Structure::Composite { .. } => (points.len() as f64).sqrt(),
        s => {
            let [a, b] = s.support_basis();
            let n = |v: (i64, i64)| ((v.0 * v.0 + v.1 * v.1) as f64).sqrt();
            n(a).max(n(b))
        }
    }
}

/// `M` times the frequency scale.
pub fn truncation_radius(points: &PointSet, multiple: f64) -> f64 {
    multiple * frequency_scale(points)
}

fn in_half_plane(m: (i64, i64)) -> bool {
    m.1 > 0 || (m.1 == 0 && m.0 > 0)
}

/// Nonzero frequencies of the support lattice in the open upper half-plane with `|m| ≤ r`.
fn lattice_frequencies(s: &Structure, r: f64) -> Vec<(i64, i64)> {
    let [v1, v2] = s.support_basis();
    let det = (v1.0 * v2.1 - v1.1 * v2.0).abs() as f64;
    let n = |v: (i64, i64)| ((v.0 * v.0 + v.1 * v.1) as f64).sqrt();
    let amax = (r * n(v2) / det).ceil() as i64 + 1;
    let bmax = (r * n(v1) / det).ceil() as i64 + 1;
    let mut out = Vec::new();
    for a in -amax..=amax {
        for b in -bmax..=bmax {
            let m = (a * v1.0 + b * v2.0, a * v1.1 + b * v2.1);
            if in_half_plane(m) && ((m.0 * m.0 + m.1 * m.1) as f64) <= r * r {
                out.push(m);
            }
        }
    }
    out.sort_by_key(|m| (m.1, m.0));
    out
}

fn sum_structured(points: &PointSet, table: &SpectralWeightTable, freqs: &[(i64, i64)]) -> Result<f64, DiscrepancyError> {
    let terms: Vec<Result<f64, DiscrepancyError>> =
        freqs.par_iter().map(|&m| Ok(points.exp_sum_sq(m) * table.weight_at(m)?)).collect();
    let mut acc = KahanSum::default();
    for t in terms {
        acc.add(t?);
    }
    Ok(2.0 * acc.value())
}

fn tail_bound(points: &PointSet, table: &SpectralWeightTable, r: f64, covolume: f64) -> f64 {
    let n = points.len() as f64;
    let c_hat = table.max_rho3_weight(0.5 * r, r);
    c_hat * n * n * 2.0 * PI / (r * covolume)
}

/// `Σ_{0<|m|≤R} |S(m)|² W(m)` with the table's weights.
pub fn d2_parseval(
    points: &PointSet,
    body: &ConvexBody,
    interval: &AngleInterval,
    r: f64,
    table: &SpectralWeightTable,
) -> Result<D2Result, DiscrepancyError> {
    check_table(body, interval, table)?;
    if r > table.rho_max() * (1.0 + 1e-12) {
        return Err(crate::fourier::FourierError::Coverage { required: r, available: table.rho_max() }.into());
    }
    match points.structure() {
        Structure::Generic => d2_parseval_generic(points, body, interval, r, table),
        s => {
            let (freqs, covolume) = match s {
                Structure::Composite { .. } => {
                    let ri = r.floor() as i64;
                    let mut f = Vec::new();
                    for b in 0..=ri {
                        for a in -ri..=ri {
                            if in_half_plane((a, b)) && ((a * a + b * b) as f64) <= r * r {
                                f.push((a, b));
                            }
                        }
                    }
                    (f, 1.0)
                }
                _ => (lattice_frequencies(s, r), s.support_covolume()),
            };
            let value = sum_structured(points, table, &freqs)?;
            Ok(D2Result {
                n: points.len(),
                method: Method::Parseval,
                value,
                r: Some(r),
                tail: tail_bound(points, table, r, covolume),
                stderr: None,
                seed: None,
                samples: None,
                frequencies: Some(2 * freqs.len()),
            })
        }
    }
}

/// [`d2_parseval`] with exponential sums summed point by point, ignoring any structure.
pub fn d2_parseval_generic(
    points: &PointSet,
    body: &ConvexBody,
    interval: &AngleInterval,
    r: f64,
    table: &SpectralWeightTable,
) -> Result<D2Result, DiscrepancyError> {
    check_table(body, interval, table)?;
    let ri = r.floor() as i64;
    let nfreq = PI * r * r / 2.0;
    let needed = points.len() as f64 * nfreq;
    if needed > GENERIC_BUDGET {
        return Err(DiscrepancyError::Budget { needed, budget: GENERIC_BUDGET });
    }
    let rows: Vec<i64> = (0..=ri).collect();
    let sums = generic_rows(points.base_points(), ri, &rows);
    let mut acc = KahanSum::default();
    let mut count = 0;
    for (&b, row) in rows.iter().zip(&sums) {
        for (i, s) in row.iter().enumerate() {
            let a = i as i64 - ri;
            if in_half_plane((a, b)) && ((a * a + b * b) as f64) <= r * r {
                acc.add(s.norm_sqr() * table.weight_at((a, b))?);
                count += 1;
            }
        }
    }
    Ok(D2Result {
        n: points.len(),
        method: Method::Parseval,
        value: 2.0 * acc.value(),
        r: Some(r),
        tail: tail_bound(points, table, r, 1.0),
        stderr: None,
        seed: None,
        samples: None,
        frequencies: Some(2 * count),
    })
}
