use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::count::{discrepancy_with, AffineTransform, Containment};
use super::{D2Result, DiscrepancyError, Method, PointSet};
use crate::geometry::{AngleInterval, ConvexBody, Vec2};
use crate::quad::KahanSum;

const CHUNK: usize = 2048;

/// Unbiased estimate of `∫_I ∫_0^1 ∫_{T²} D² dτ dδ dθ` from uniform samples of `(τ, δ, θ)`.
pub fn d2_montecarlo(
    points: &PointSet,
    body: &ConvexBody,
    interval: &AngleInterval,
    samples: usize,
    seed: u64,
) -> Result<D2Result, DiscrepancyError> {
    if samples < 2 {
        return Err(DiscrepancyError::Argument("need at least 2 samples".into()));
    }
    let c = Containment::new(body);
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(ci as u64);
            let n = CHUNK.min(samples - ci * CHUNK);
            let (mut s1, mut s2) = (KahanSum::default(), KahanSum::default());
            for _ in 0..n {
                let tau = Vec2::new(rng.random::<f64>(), rng.random::<f64>());
                // δ in (0, 1]
                let delta = 1.0 - rng.random::<f64>();
                let theta = interval.start + interval.length * rng.random::<f64>();
                let d = discrepancy_with(&c, points.points(), &AffineTransform { tau, delta, theta });
                s1.add(d * d);
                s2.add(d * d * d * d);
            }
            (s1.value(), s2.value())
        })
        .collect();
    let (mut s1, mut s2) = (KahanSum::default(), KahanSum::default());
    for (a, b) in partial {
        s1.add(a);
        s2.add(b);
    }
    let n = samples as f64;
    let mean = s1.value() / n;
    let var = ((s2.value() / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let len = interval.length;
    Ok(D2Result {
        n: points.len(),
        method: Method::MonteCarlo,
        value: len * mean,
        r: None,
        tail: 0.0,
        stderr: Some(len * (var / n).sqrt()),
        seed: Some(seed),
        samples: Some(samples),
        frequencies: None,
    })
}
