//! Planar convex bodies, Fourier transforms of their indicators, and the affine
//! quadratic discrepancy of point sets on the unit torus.

pub mod bodies;
pub mod discrepancy;
pub mod experiment;
pub mod fourier;
pub mod geometry;
pub mod pointsets;
pub mod quad;

pub use geometry::{AngleInterval, ConvexBody, Vec2};
