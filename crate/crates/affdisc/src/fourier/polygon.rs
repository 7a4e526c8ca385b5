use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::{ConvexBody, Vec2};

/// `sin z / z`, with a series near zero.
pub(crate) fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-6 {
        1.0 - z * z / 6.0
    } else {
        z.sin() / z
    }
}

/// `∫_C e^{-2πi x·ξ} dx` for a polygon, by reducing to a sum over edges.
pub fn ft_polygon(vertices: &[Vec2], area: f64, centroid: Vec2, xi: Vec2) -> Complex64 {
    let r2 = xi.dot(xi);
    let diam = vertices.iter().map(|v| (*v - vertices[0]).norm()).fold(0.0, f64::max);
    if r2.sqrt() * diam.max(1e-300) < 1e-7 {
        // first-order Taylor expansion; the edge sum cancels badly here
        return Complex64::new(area, -2.0 * PI * area * xi.dot(centroid));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let n = vertices.len();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let d = b - a;
        let flux = xi.x * d.y - xi.y * d.x;
        if flux == 0.0 {
            continue;
        }
        let mid = (a + b) * 0.5;
        let phase = Complex64::from_polar(1.0, -2.0 * PI * mid.dot(xi));
        acc += phase * (flux * sinc(PI * d.dot(xi)));
    }
    acc * Complex64::new(0.0, 1.0 / (2.0 * PI * r2))
}

/// [`ft_polygon`] for a polygon body.
pub fn ft_polygon_body(body: &ConvexBody, xi: Vec2) -> Complex64 {
    ft_polygon(body.vertices(), body.area(), body.centroid(), xi)
}
