//! Fourier transforms of convex indicator functions and their averages over
//! dilations and rotations.

mod averages;
mod polygon;
mod profile;
mod table;

use num_complex::Complex64;

pub use averages::{
    dilation_avg_sq, dilation_avg_sq_many, rotation_dilation_avg_sq, rotation_dilation_avg_sq_many, spherical_avg_sq,
    spherical_avg_sq_with, AvgOptions, Averaged, Ray,
};
pub use polygon::{ft_polygon, ft_polygon_body};
pub use profile::{ft_profile, Profile};
pub use table::{ProbeReport, SpectralWeightTable, TableSpec};

use crate::geometry::{BodyError, ConvexBody, Vec2};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FourierError {
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error("{what} did not converge (error estimate {error:e})")]
    Quadrature { what: String, error: f64 },
    #[error("weight table reaches radius {available}, frequencies up to {required} are needed")]
    Coverage { required: f64, available: f64 },
    #[error("weight table probe failed: {0}")]
    Probe(String),
    #[error("weight table file: {0}")]
    Io(String),
    #[error("{0}")]
    Argument(String),
}

/// `∫_C e^{-2πi x·ξ} dx`.
pub fn ft(body: &ConvexBody, xi: Vec2) -> Result<Complex64, FourierError> {
    if body.is_polygon() {
        return Ok(ft_polygon_body(body, xi));
    }
    let r = xi.norm();
    if r == 0.0 {
        return Ok(Complex64::new(body.area(), 0.0));
    }
    Ok(ft_profile(body, xi.angle(), r)?)
}
