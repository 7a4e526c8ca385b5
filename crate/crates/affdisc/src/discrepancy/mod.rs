//! Discrepancy of point sets on the torus for rotated, dilated and translated
//! copies of a convex body, and the mean-square (affine quadratic) discrepancy.

mod cassels;
mod count;
mod montecarlo;
mod parseval;
mod pointset;

use serde::{Deserialize, Serialize};

pub use cassels::{cassels_montgomery_check, CasselsReport};
pub use count::{discrepancy, discrepancy_with, AffineTransform, Containment};
pub use montecarlo::d2_montecarlo;
pub use parseval::{d2_parseval, d2_parseval_generic, frequency_scale, truncation_radius};
pub use pointset::{PointSet, PointSetError, Structure};

use crate::fourier::FourierError;
use crate::geometry::{AngleInterval, ConvexBody, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Parseval,
    MonteCarlo,
}

/// A value of the mean-square discrepancy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D2Result {
    pub n: usize,
    pub method: Method,
    pub value: f64,
    /// Truncation radius of the frequency sum.
    pub r: Option<f64>,
    pub tail: f64,
    pub stderr: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub frequencies: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiscrepancyError {
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error("weight table was built for another body or interval")]
    TableMismatch,
    #[error("generic exponential sums need {needed:e} operations, budget is {budget:e}")]
    Budget { needed: f64, budget: f64 },
    #[error("{0}")]
    Argument(String),
}

/// Largest allowed `N · #frequencies` for generic point sets.
pub const GENERIC_BUDGET: f64 = 5e8;

/// Rescales a body to diameter 0.8 and centroid `(1/2, 1/2)`.
pub fn normalize_for_torus(body: &ConvexBody) -> ConvexBody {
    body.normalized(0.8, Vec2::new(0.5, 0.5))
}

pub(crate) fn check_table(
    body: &ConvexBody,
    interval: &AngleInterval,
    table: &crate::fourier::SpectralWeightTable,
) -> Result<(), DiscrepancyError> {
    let same_interval = (table.interval.start - interval.start).abs() < 1e-9
        && (table.interval.length - interval.length).abs() < 1e-9;
    if table.body_hash != body.content_hash() || !same_interval {
        return Err(DiscrepancyError::TableMismatch);
    }
    Ok(())
}
