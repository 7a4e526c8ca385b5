use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};

use affdisc::bodies::{self, IntermediateBodySpec};
use affdisc::fourier::*;
use affdisc::geometry::{AngleInterval, ConvexBody, Piece, Vec2};
use affdisc::quad;
use num_complex::Complex64;
use proptest::prelude::*;

fn c_body() -> ConvexBody {
    bodies::make_c(&IntermediateBodySpec::new(FRAC_PI_2, 2.0)).unwrap()
}

fn zoo() -> Vec<ConvexBody> {
    vec![
        bodies::disc(Vec2::ZERO, 1.0),
        bodies::rectangle(1.0, 1.0),
        bodies::regular_polygon(6, 1.0).unwrap(),
        bodies::rectangle(3.0, 1.0),
        c_body(),
    ]
}

/// `∫∫_{|x|≤1} e^{-2πi x·ξ} dx` by Gauss-Legendre in r and the trapezoid rule in angle.
fn disc_tensor_oracle(rho: f64) -> f64 {
    let (x, w) = quad::gauss_legendre(200);
    let m = 400;
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let r = 0.5 * (xi + 1.0);
        let inner: f64 = (0..m).map(|k| (TAU * rho * r * (TAU * k as f64 / m as f64).cos()).cos()).sum();
        s += 0.5 * wi * r * inner * TAU / m as f64;
    }
    s
}

/// Divergence-theorem boundary integral with dense Gauss-Legendre on each piece.
fn boundary_oracle(body: &ConvexBody, xi: Vec2) -> Complex64 {
    let (x, w) = quad::gauss_legendre(64);
    let mut acc = Complex64::new(0.0, 0.0);
    for p in body.pieces() {
        let sub = 64;
        for k in 0..sub {
            let (a, b) = (k as f64 / sub as f64, (k + 1) as f64 / sub as f64);
            for (xi_, wi) in x.iter().zip(&w) {
                let t = 0.5 * (a + b) + 0.5 * (b - a) * xi_;
                let g = p.point(t);
                let d = p.deriv(t);
                let flux = xi.x * d.y - xi.y * d.x;
                acc += Complex64::from_polar(1.0, -TAU * g.dot(xi)) * (0.5 * (b - a) * wi * flux);
            }
        }
    }
    acc * Complex64::new(0.0, 1.0 / (TAU * xi.dot(xi)))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn geometric(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a * (b / a).powf(k as f64 / (n - 1) as f64)).collect()
}

#[test]
fn polygon_transform_examples() {
    let sq = bodies::centered_square(1.0);
    assert!((ft_polygon_body(&sq, Vec2::ZERO) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    assert!(ft_polygon_body(&sq, Vec2::new(1.0, 0.0)).norm() < 1e-15);
    assert!((ft_polygon_body(&sq, Vec2::new(0.5, 0.0)).re - 2.0 / PI).abs() < 1e-14);
    // tiny frequencies fall back to the series
    let v = ft_polygon_body(&sq, Vec2::new(1e-9, 2e-9));
    assert!((v.re - 1.0).abs() < 1e-12 && v.im.abs() < 1e-12);
}

#[test]
fn polygon_transform_matches_boundary_integral() {
    let bodies = [bodies::regular_polygon(3, 0.7).unwrap(), bodies::regular_polygon(7, 1.1).unwrap().translated(Vec2::new(0.3, -0.2))];
    for b in &bodies {
        for k in 0..15 {
            let xi = Vec2::unit(0.41 * k as f64) * (0.3 + 2.1 * k as f64);
            let d = ft_polygon_body(b, xi) - boundary_oracle(b, xi);
            assert!(d.norm() < 1e-12, "{xi:?}: {d}");
        }
    }
}

#[test]
fn profile_transform_disc() {
    let d = bodies::disc(Vec2::ZERO, 1.0);
    assert!((ft_profile(&d, 0.2, 0.0).unwrap().re - PI).abs() < 1e-12);
    for rho in [1.5, 7.3, 30.0] {
        let v = ft_profile(&d, 1.0, rho).unwrap();
        let want = disc_tensor_oracle(rho);
        assert!((v.re - want).abs() < 1e-9 && v.im.abs() < 1e-9, "rho={rho}: {v} vs {want}");
    }
}

#[test]
fn profile_transform_matches_polygon_formula() {
    let sq = bodies::centered_square(1.0);
    let mut seed = 12345u64;
    for _ in 0..20 {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let th = TAU * (seed >> 11) as f64 / (1u64 << 53) as f64;
        let rho = 100.0 * (seed >> 40) as f64 / (1u64 << 24) as f64;
        let a = ft_profile(&sq, th, rho).unwrap();
        let b = ft_polygon_body(&sq, Vec2::unit(th) * rho);
        assert!((a - b).norm() < 1e-8);
    }
}

#[test]
fn profile_transform_of_arc_body_matches_boundary_integral() {
    let c = c_body();
    for k in 0..10 {
        let th = 0.63 * k as f64;
        let rho = 0.5 + 9.0 * k as f64;
        let got = ft(&c, Vec2::unit(th) * rho).unwrap();
        let want = boundary_oracle(&c, Vec2::unit(th) * rho);
        assert!((got - want).norm() < 1e-9, "th={th} rho={rho}: {got} vs {want}");
    }
}

#[test]
fn profile_is_concave_chord_function() {
    let c = c_body();
    let p = Profile::new(&c, 0.4).unwrap();
    let w = p.width();
    for k in 1..200 {
        let t = p.a + w * k as f64 / 200.0;
        let want = c.chord_length(0.4, t - p.a).unwrap();
        assert!((p.g(t) - want).abs() < 1e-7);
        let h = w / 400.0;
        if t - h > p.a && t + h < p.b {
            assert!(p.g(t) >= 0.5 * (p.g(t - h) + p.g(t + h)) - 1e-9);
        }
    }
    assert_eq!(p.g(p.a - 0.1), 0.0);
}

#[test]
fn dilation_average_square_slopes() {
    let sq = bodies::rectangle(1.0, 1.0);
    let rhos = geometric(16.0, 512.0, 16);
    let v0 = dilation_avg_sq_many(&sq, 0.0, &rhos, 4).unwrap();
    let v4 = dilation_avg_sq_many(&sq, FRAC_PI_4, &rhos, 4).unwrap();
    assert!((slope(&rhos, &v0) + 2.0).abs() < 0.1);
    assert!((slope(&rhos, &v4) + 4.0).abs() < 0.15);
    for (r, v) in rhos.iter().zip(&v0) {
        if *r >= 32.0 {
            let g = sq.gamma(0.0, 1.0 / r).unwrap();
            let ratio = v / (g * g / (r * r));
            assert!(ratio > 0.0 && ratio <= 2.0);
        }
    }
}

#[test]
fn rotation_average_slopes() {
    let rhos = geometric(8.0, 256.0, 16);
    let d = bodies::disc(Vec2::ZERO, 1.0);
    let opts = AvgOptions { rel_tol: 1e-5, ..AvgOptions::default() };
    let v = rotation_dilation_avg_sq_many(&d, &AngleInterval::full(), &rhos, &opts).unwrap();
    assert!((slope(&rhos, &v.value) + 3.0).abs() < 0.1);
    // inside the normal set of the corner at the origin, away from the edges
    let sq = bodies::rectangle(1.0, 1.0);
    let i = AngleInterval::new(FRAC_PI_8, FRAC_PI_4);
    let v = rotation_dilation_avg_sq_many(&sq, &i, &rhos, &opts).unwrap();
    assert!((slope(&rhos, &v.value) + 4.0).abs() < 0.15, "{}", slope(&rhos, &v.value));
    assert_eq!(rotation_dilation_avg_sq(&sq, &AngleInterval::new(0.3, 0.0), 10.0).unwrap(), 0.0);
}

#[test]
fn spherical_average_decays_like_rho_cubed() {
    for b in [bodies::disc(Vec2::ZERO, 1.0), bodies::rectangle(1.0, 1.0)] {
        let i = AngleInterval::new(-0.5, 1.0);
        let bound = 2.0 * b.perimeter();
        for rho in [8.0, 24.0, 64.0] {
            let v = spherical_avg_sq(&b, &i, rho).unwrap();
            let s = rho.powi(3) * v;
            assert!(s > 0.0 && s <= bound, "{s}");
        }
        assert_eq!(spherical_avg_sq(&b, &AngleInterval::new(1.0, 0.0), 9.0).unwrap(), 0.0);
    }
}

/// ∫_I γ² dθ by adaptive quadrature.
fn gamma_sq_integral(b: &ConvexBody, i: &AngleInterval, rho: f64) -> f64 {
    let (a, e) = (i.start, i.start + i.length);
    let mut breaks = Vec::new();
    for c in b.critical_normals() {
        for k in -2..=4 {
            let x = c + k as f64 * PI;
            if x > a && x < e {
                breaks.push(x);
            }
        }
    }
    quad::integrate(|t| b.gamma(t, 1.0 / rho).unwrap().powi(2), a, e, &breaks, 0.0, 1e-8, 20_000).value
}

#[test]
fn gamma_integral_matches_perimeter_portions() {
    let polys = [bodies::rectangle(1.0, 1.0), bodies::regular_polygon(6, 1.0).unwrap(), bodies::rectangle(3.0, 1.0)];
    for b in &polys {
        for i in [AngleInterval::full(), AngleInterval::new(-0.3, 1.0), AngleInterval::new(0.2, 0.5)] {
            let p = b.portion_of_perimeter(&i) + b.portion_of_perimeter(&i.shifted(PI));
            for rho in [1e3, 1e4] {
                let v = rho * gamma_sq_integral(b, &i, rho);
                if p > 0.0 {
                    assert!(v >= 0.9 * p && v <= 8.8 * p, "{v} vs {p}");
                }
            }
        }
    }
}

#[test]
fn wide_intervals_keep_cubic_decay_in_every_direction() {
    let sq = bodies::rectangle(1.0, 1.0);
    let len = 0.6 * PI;
    assert!(len > sq.angular_trace().psi);
    let opts = AvgOptions { rel_tol: 1e-4, ..AvgOptions::default() };
    let mut mins = Vec::new();
    for rho in [16.0, 128.0] {
        let mut m = f64::INFINITY;
        for j in 0..32 {
            let omega = PI * j as f64 / 32.0;
            let w = rotation_dilation_avg_sq_many(&sq, &AngleInterval::new(omega - len, len), &[rho], &opts).unwrap();
            m = m.min(rho.powi(3) * w.value[0]);
        }
        mins.push(m);
    }
    assert!(mins.iter().all(|m| *m > 1e-3), "{mins:?}");
    assert!(mins[1] > 0.25 * mins[0], "{mins:?}");
}

#[test]
fn weight_table_properties() {
    let disc = bodies::disc(Vec2::new(0.5, 0.5), 0.4);
    let mut spec = TableSpec::new(64.0);
    spec.angle_step = 0.2;
    let t = SpectralWeightTable::build(&disc, &AngleInterval::full(), &spec).unwrap();
    for row in &t.values {
        let hi = row.iter().copied().fold(0.0, f64::max);
        let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(lo >= 0.0 && (hi - lo) <= 0.02 * hi);
    }
    let r = t.probe(&disc, 4, 3).unwrap();
    assert!(r.worst_rel < 0.01, "{r:?}");
    assert!(matches!(t.weight(65.0, 0.0), Err(FourierError::Coverage { .. })));

    let sq = bodies::rectangle(0.5, 0.5);
    let i = AngleInterval::new(0.2, 0.7);
    let mut spec = TableSpec::new(96.0);
    spec.angle_step = 0.02;
    let t = SpectralWeightTable::build(&sq, &i, &spec).unwrap();
    assert!(t.values.iter().flatten().all(|v| *v >= 0.0));
    let r = t.validate(&sq, 6, 11, 0.01).unwrap();
    assert!(r.worst_rel < 0.01);

    let dir = std::env::temp_dir().join(format!("affdisc-table-{}.csv", std::process::id()));
    t.save_csv(&dir).unwrap();
    let back = SpectralWeightTable::load_csv(&dir).unwrap();
    std::fs::remove_file(&dir).ok();
    assert_eq!(back.body_hash, t.body_hash);
    assert_eq!(back.radii.len(), t.radii.len());
    for (a, b) in back.values.iter().flatten().zip(t.values.iter().flatten()) {
        assert!((a - b).abs() <= 1e-15 * b.abs());
    }
    for (rho, om) in [(3.3, 0.1), (50.0, 2.0), (95.0, 3.0)] {
        assert!((back.weight(rho, om).unwrap() - t.weight(rho, om).unwrap()).abs() <= 1e-12 * t.weight(rho, om).unwrap());
    }
}

#[test]
fn arc_body_profile_has_no_segments() {
    assert!(c_body().pieces().iter().all(|p| !matches!(p, Piece::Segment { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_symmetry_and_area(which in 0usize..5, th in 0.0f64..TAU, rho in 0.0f64..40.0) {
        let b = &zoo()[which];
        let xi = Vec2::unit(th) * rho;
        let a = ft(b, xi).unwrap();
        let m = ft(b, xi * -1.0).unwrap();
        prop_assert!((a.norm() - m.norm()).abs() < 1e-10);
        prop_assert!((ft(b, Vec2::ZERO).unwrap().re - b.area()).abs() < 1e-10);
    }

    #[test]
    fn transform_bounded_by_chord_over_rho(which in 0usize..5, th in 0.0f64..TAU, t in 0.0f64..1.0) {
        let b = &zoo()[which];
        let (_, s) = b.diameters();
        let rho = 2.0 / s * (500.0f64).powf(t);
        let v = ft(b, Vec2::unit(th) * rho).unwrap().norm();
        let g = b.gamma(th, 1.0 / rho).unwrap();
        prop_assert!(v <= g / rho * (1.0 + 1e-9) + 1e-12, "{} > {}", v, g / rho);
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn dilation_average_upper_bound(which in 0usize..5, th in 0.0f64..TAU, t in 0.0f64..1.0) {
        let b = &zoo()[which];
        let (l, s) = b.diameters();
        let rho = 10.0 * l.powi(6) / s.powi(7) * 4f64.powf(t);
        let v = dilation_avg_sq_many(b, th, &[rho], 4).unwrap()[0];
        let g = b.gamma(th, 1.0 / rho).unwrap();
        prop_assert!(v <= 2.0 * g * g / (rho * rho));
    }
}
