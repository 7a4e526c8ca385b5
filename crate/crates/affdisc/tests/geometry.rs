use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use affdisc::bodies::{self, IntermediateBodySpec};
use affdisc::geometry::{eta, AngleInterval, ConvexBody, Vec2};
use proptest::prelude::*;

fn unit_square() -> ConvexBody {
    bodies::rectangle(1.0, 1.0)
}

fn unit_disc() -> ConvexBody {
    bodies::disc(Vec2::ZERO, 1.0)
}

fn zoo() -> Vec<(&'static str, ConvexBody)> {
    vec![
        ("disc", unit_disc()),
        ("square", unit_square()),
        ("hexagon", bodies::regular_polygon(6, 1.0).unwrap()),
        ("rect1x3", bodies::rectangle(3.0, 1.0)),
        ("C(pi/2,2)", bodies::make_c(&IntermediateBodySpec::new(FRAC_PI_2, 2.0)).unwrap()),
        ("triangle", bodies::regular_polygon(3, 0.7).unwrap()),
    ]
}

/// Dense polyline through the boundary.
fn boundary_samples(body: &ConvexBody, per_piece: usize) -> Vec<Vec2> {
    let mut pts = Vec::new();
    for p in body.pieces() {
        let m = if p.is_segment() { 1 } else { per_piece };
        for k in 0..m {
            pts.push(p.point(k as f64 / m as f64));
        }
    }
    pts
}

/// Chord length by intersecting the line `x·u = min + λ` with a dense polyline.
fn brute_chord(pts: &[Vec2], theta: f64, lambda: f64) -> f64 {
    let u = Vec2::unit(theta);
    let min = pts.iter().map(|p| p.dot(u)).fold(f64::INFINITY, f64::min);
    let h = min + lambda;
    let mut hits = Vec::new();
    for i in 0..pts.len() {
        let a = pts[i];
        let b = pts[(i + 1) % pts.len()];
        let (fa, fb) = (a.dot(u) - h, b.dot(u) - h);
        if (fa <= 0.0 && fb > 0.0) || (fa > 0.0 && fb <= 0.0) {
            let t = fa / (fa - fb);
            hits.push((a + (b - a) * t).dot(u.perp()));
        }
    }
    let lo = hits.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

#[test]
fn chord_examples() {
    let d = unit_disc();
    assert!((d.chord_length(0.7, 1.0).unwrap() - 2.0).abs() < 1e-9);
    assert!((d.chord_length(2.1, 0.5).unwrap() - 2.0 * 0.75f64.sqrt()).abs() < 1e-10);
    let s = unit_square();
    assert!((s.chord_length(FRAC_PI_4, 0.3).unwrap() - 0.6).abs() < 1e-12);
    assert!(s.chord(0.0, 1.5).is_err());
    // supporting edge at zero depth
    assert!((s.chord_length(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
    assert!(s.chord_length(0.2, 0.0).unwrap().abs() < 1e-15);
}

#[test]
fn chord_orientation_convention() {
    for (_, b) in zoo() {
        for k in 0..12 {
            let th = 0.1 + k as f64 * 0.5;
            let w = b.width(th);
            let c = b.chord(th, 0.37 * w).unwrap();
            let diff = c.p_minus - c.p_plus;
            let up = Vec2::unit(th).perp();
            assert!((diff - up * c.length).norm() < 1e-9 * (1.0 + c.length));
            let m = b.min_dot(th);
            for p in [c.p_minus, c.p_plus] {
                assert!((p.dot(Vec2::unit(th)) - m - 0.37 * w).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn gamma_examples() {
    let s = unit_square();
    assert!((s.gamma(FRAC_PI_4, 0.1).unwrap() - 0.2).abs() < 1e-12);
    let d = unit_disc();
    assert!((d.gamma(0.4, 0.5).unwrap() - 1.7320508075688772).abs() < 1e-9);
    let r = bodies::rectangle(1.0, 2.0);
    assert!((r.gamma(0.0, 0.1).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn diameters_examples() {
    let (l, s) = unit_square().diameters();
    assert!((l - 2f64.sqrt()).abs() < 1e-12 && (s - 1.0).abs() < 1e-9);
    let (l, s) = unit_disc().diameters();
    assert!((l - 2.0).abs() < 1e-8 && (s - 2.0).abs() < 1e-8);
    let r = bodies::rectangle(3.0, 1.0);
    let (l, s) = r.diameters();
    // brute force over a dense direction grid and dense depths
    let pts = boundary_samples(&r, 1);
    let mut s_brute = f64::INFINITY;
    for k in 0..3600 {
        let th = PI * k as f64 / 3600.0;
        let w = r.width(th);
        let m = (0..=400).map(|j| brute_chord(&pts, th, w * j as f64 / 400.0)).fold(0.0, f64::max);
        s_brute = s_brute.min(m);
    }
    assert!((l - 10f64.sqrt()).abs() < 1e-12);
    assert!((s - s_brute).abs() < 1e-6 && (s - 1.0).abs() < 1e-9, "{s} vs {s_brute}");
}

#[test]
fn normal_interval_examples() {
    let d = unit_disc();
    for s in [0.0, 1.0, 4.0] {
        let i = d.normal_interval(s);
        assert_eq!(i.length, 0.0);
        // the boundary point at s minimises x·u(ν)
        let p = d.point(d.pos_at_arclen(s));
        assert!((p.dot(Vec2::unit(i.start)) + 1.0).abs() < 1e-9);
    }
    let sq = unit_square();
    for k in 0..4 {
        let i = sq.normal_interval(k as f64);
        assert!((i.length - FRAC_PI_2).abs() < 1e-12);
        let n = (i.start / FRAC_PI_2).round();
        assert!((i.start - n * FRAC_PI_2).abs() < 1e-12);
    }
    assert_eq!(sq.normal_interval(0.5).length, 0.0);
}

/// ψ by scanning directions: θ is in the trace iff a single vertex minimises x·u(θ).
fn brute_psi(vertices: &[Vec2]) -> f64 {
    const N: usize = 36_000;
    let in_trace = |th: f64| {
        let u = Vec2::unit(th);
        let vals: Vec<f64> = vertices.iter().map(|v| v.dot(u)).collect();
        let m = vals.iter().copied().fold(f64::INFINITY, f64::min);
        vals.iter().filter(|&&v| v - m < 1e-12).count() == 1
    };
    let flags: Vec<bool> = (0..N).map(|k| {
        let th = TAU * k as f64 / N as f64;
        in_trace(th) && in_trace(th - PI)
    }).collect();
    let mut best = 0;
    let mut run = 0;
    for k in 0..2 * N {
        if flags[k % N] {
            run += 1;
            best = best.max(run.min(N));
        } else {
            run = 0;
        }
    }
    TAU * best as f64 / N as f64
}

#[test]
fn angular_trace_matches_direction_scan() {
    for n in [3usize, 4, 5, 6, 8] {
        let b = bodies::regular_polygon(n, 1.0).unwrap();
        let t = b.angular_trace();
        let brute = brute_psi(b.vertices());
        assert!((t.psi - brute).abs() < 2.0 * TAU / 36_000.0, "n={n}: {} vs {brute}", t.psi);
        for c in &t.components {
            assert!((c.length - TAU / n as f64).abs() < 1e-12);
        }
    }
    let hex = bodies::regular_polygon(6, 1.0).unwrap().angular_trace();
    assert!((hex.psi - PI / 3.0).abs() < 1e-12);
    let sq = unit_square().angular_trace();
    assert!((sq.psi - FRAC_PI_2).abs() < 1e-12);
    let oct = bodies::regular_polygon(8, 1.0).unwrap().angular_trace();
    assert!((oct.psi - FRAC_PI_4).abs() < 1e-12);
    let d = unit_disc().angular_trace();
    assert!(d.components.is_empty() && d.psi == 0.0);
}

#[test]
fn centrally_symmetric_psi_is_longest_normal_set() {
    for b in [unit_square(), bodies::regular_polygon(6, 1.0).unwrap(), bodies::rectangle(3.0, 1.0)] {
        let longest = b.angular_points().iter().map(|(_, i)| i.length).fold(0.0, f64::max);
        assert!((b.angular_trace().psi - longest).abs() < 1e-12);
    }
}

/// Portion of perimeter from a dense polyline: finite-difference normals.
fn brute_portion(body: &ConvexBody, interval: &AngleInterval) -> f64 {
    let pts = boundary_samples(body, 20_000);
    let mut total = 0.0;
    for i in 0..pts.len() {
        let a = pts[i];
        let b = pts[(i + 1) % pts.len()];
        let nu = (b - a).angle() + FRAC_PI_2;
        if interval.contains(nu, 1e-9) {
            total += (b - a).norm();
        }
    }
    total
}

#[test]
fn portion_of_perimeter_examples() {
    let d = unit_disc();
    let i = AngleInterval::new(0.3, FRAC_PI_2);
    assert!((d.portion_of_perimeter(&i) - FRAC_PI_2).abs() < 1e-10);
    assert!((brute_portion(&d, &i) - FRAC_PI_2).abs() < 1e-3);
    let s = unit_square();
    let i = AngleInterval::new(-FRAC_PI_4, FRAC_PI_2);
    assert!((s.portion_of_perimeter(&i) - 1.0).abs() < 1e-14);
    assert!((brute_portion(&s, &i) - 1.0).abs() < 1e-12);
    for (_, b) in zoo() {
        assert!((b.portion_of_perimeter(&AngleInterval::full()) - b.perimeter()).abs() < 1e-12);
        let i = AngleInterval::new(1.0, 2.0);
        let exact = b.portion_of_perimeter(&i);
        assert!((exact - brute_portion(&b, &i)).abs() < 2e-3 * b.perimeter());
    }
}

#[test]
fn semi_chord_examples() {
    let d = unit_disc();
    let sc = d.semi_chords(1.1, 0.02).unwrap();
    let want = (0.02f64 * 1.98).sqrt();
    assert!((sc.left_len - want).abs() < 1e-9 && (sc.right_len - want).abs() < 1e-9);
    let s = unit_square();
    let sc = s.semi_chords(FRAC_PI_4, 0.1).unwrap();
    assert!((sc.left_len - 0.1).abs() < 1e-12 && (sc.right_len - 0.1).abs() < 1e-12);
    // split point on the supporting edge midpoint
    let sc = s.semi_chords(0.0, 0.2).unwrap();
    assert!((sc.right_len - 0.5).abs() < 1e-12);
    let p = s.perimeter();
    assert!(eta(p, sc.s_minus, sc.s_o).unwrap() <= eta(p, sc.s_minus, sc.s_plus).unwrap() + 1e-12);
}

#[test]
fn semichord_average_examples() {
    let d = unit_disc();
    let v = d.semichord_average(&AngleInterval::new(0.0, FRAC_PI_2), 1e-3).unwrap();
    assert!((v.value / FRAC_PI_2 - 1.0).abs() < 0.02);
    let s = unit_square();
    let v = s.semichord_average(&AngleInterval::new(-FRAC_PI_4, FRAC_PI_2), 1e-3).unwrap();
    assert!((v.value - 1.0).abs() < 0.03, "{}", v.value);
    let v = s.semichord_average(&AngleInterval::new(0.2, 0.0), 1e-3).unwrap();
    assert_eq!(v.value, 0.0);
}

#[test]
fn corner_law_for_polygon_vertices() {
    for b in [unit_square(), bodies::regular_polygon(5, 1.0).unwrap(), bodies::rectangle(3.0, 1.0)] {
        for (_, nu) in b.angular_points() {
            for frac in [0.2, 0.5, 0.77] {
                let th = nu.start + frac * nu.length;
                let e1 = eta(TAU, nu.start, th).unwrap();
                let e2 = eta(TAU, th, nu.end()).unwrap();
                let want = 1.0 / e1.tan() + 1.0 / e2.tan();
                let got = b.chord_length(th, 1e-4).unwrap() / 1e-4;
                assert!((got / want - 1.0).abs() < 0.01);
            }
        }
    }
}

#[test]
fn h_and_c_construction() {
    let spec = IntermediateBodySpec::new(FRAC_PI_2, 2.0);
    let h = bodies::make_h(&spec).unwrap();
    assert!((h.angular_trace().psi - FRAC_PI_2).abs() < 1e-9);
    let n = h.normal_interval(0.0);
    assert!(n.start.abs() < 1e-9 && (n.length - FRAC_PI_2).abs() < 1e-9);
    let c = bodies::make_c(&spec).unwrap();
    let n = c.normal_interval(0.0);
    assert!((n.start - (TAU - FRAC_PI_4)).abs() < 1e-9 && (n.length - FRAC_PI_2).abs() < 1e-9);
    assert!((c.angular_trace().psi - FRAC_PI_2).abs() < 1e-9);
    for k in 0..20 {
        let th = 0.31 * k as f64;
        assert!((c.support(th) - c.support(-th)).abs() < 1e-9);
    }
    let (l, _) = c.diameters();
    assert!(l <= 0.8 + 1e-9);
}

#[test]
fn h_corner_chords_match_f_and_g_oracles() {
    let spec = IntermediateBodySpec::new(FRAC_PI_2, 2.0);
    let h = bodies::make_h(&spec).unwrap();
    let coef = bodies::h_power_coef(&h).unwrap();
    // y = c x^α is F(α) scaled by 1/s with s = c^{1/(α−1)}
    let s = coef.powf(1.0 / (spec.alpha - 1.0));
    for th in [FRAC_PI_4 + 0.05, 1.0, 1.3, FRAC_PI_2] {
        for lam in [1e-3, 1e-4, 1e-5] {
            let want = bodies::f_alpha_chord_oracle(spec.alpha, th, 1.0 / (s * lam)).unwrap() / s;
            let got = h.chord_length(th, lam).unwrap();
            assert!((got / want - 1.0).abs() < 0.01, "th={th} lam={lam}: {got} vs {want}");
        }
    }
    for beta in [0.05, 0.1] {
        let th = FRAC_PI_2 + beta;
        for lam in [1e-5, 1e-6] {
            let (total, left, right) = bodies::g_alpha_chord_oracle(spec.alpha, th, 1.0 / (s * lam)).unwrap();
            let sc = h.semi_chords(th, lam).unwrap();
            assert!((sc.base.length * s / total - 1.0).abs() < 0.01);
            assert!((sc.right_len * s / right - 1.0).abs() < 0.01);
            assert!((sc.left_len * s / left - 1.0).abs() < 0.01);
        }
    }
}

#[test]
fn g_oracle_properties() {
    // left ≤ 2^α right for α = 2
    for k in 0..50 {
        let th = FRAC_PI_2 + 0.002 * k as f64;
        for rho in [1e2, 1e4, 1e6] {
            let (t, l, r) = bodies::g_alpha_chord_oracle(2.0, th, rho).unwrap();
            assert!(l <= 4.0 * r + 1e-15);
            assert!((l + r - t).abs() < 1e-12 * t);
        }
    }
    // ρ^{-1/2} law in the tilted regime
    let (a, _, _) = bodies::g_alpha_chord_oracle(2.0, FRAC_PI_2 + 0.1, 1e6).unwrap();
    let (b, _, _) = bodies::g_alpha_chord_oracle(2.0, FRAC_PI_2 + 0.1, 4e6).unwrap();
    assert!((a / b - 2.0).abs() < 1e-6);
    // inversion of the tangent excess
    for alpha in [1.5, 2.0, 3.5] {
        for y in [1e-8, 1e-3, 0.5, 10.0] {
            for pos in [true, false] {
                let z = bodies::invert_tangent_excess(alpha, y, pos).unwrap();
                assert!((bodies::tangent_excess(alpha, z) - y).abs() < 1e-10 * y.max(1.0));
            }
        }
    }
}

#[test]
fn f_oracle_regimes_are_continuous() {
    let alpha = 2.0;
    for rho in [1e4f64, 1e6] {
        let b: f64 = rho.powf((1.0 - alpha) / alpha);
        let below = bodies::f_alpha_chord_oracle(alpha, FRAC_PI_2 - 0.99 * b, rho).unwrap();
        let above = bodies::f_alpha_chord_oracle(alpha, FRAC_PI_2 - 1.01 * b, rho).unwrap();
        assert!(below / above < 2.0 && above / below < 2.0);
    }
    // second regime: length ≍ 1/(ρ (π/2 − θ))
    let l1 = bodies::f_alpha_chord_oracle(2.0, FRAC_PI_2 - 0.3, 1e6).unwrap();
    let l2 = bodies::f_alpha_chord_oracle(2.0, FRAC_PI_2 - 0.3, 2e6).unwrap();
    assert!((l1 / l2 - 2.0).abs() < 0.01);
    let c = l1 * 0.3 * 1e6;
    assert!(c > 0.5 && c < 2.0);
}

#[test]
fn json_round_trip_of_constructed_body() {
    let c = bodies::make_c(&IntermediateBodySpec::new(1.2, 3.0)).unwrap();
    let back = ConvexBody::from_json(&c.to_json()).unwrap();
    assert!((back.area() - c.area()).abs() < 1e-14);
    assert!(ConvexBody::from_json(r#"{"kind":"polygon","vertices":[[0,0],[1,0]]}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chord_matches_dense_sampling(which in 0usize..6, th in 0.0f64..TAU, frac in 0.05f64..0.95) {
        let (_, b) = &zoo()[which];
        let pts = boundary_samples(b, 100_000);
        let w = b.width(th);
        let got = b.chord_length(th, frac * w).unwrap();
        let want = brute_chord(&pts, th, frac * w);
        prop_assert!((got - want).abs() <= 1e-6 * want.max(1e-3), "{} vs {}", got, want);
    }

    #[test]
    fn gamma_is_pi_periodic_and_chords_concave(which in 0usize..6, th in 0.0f64..TAU, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (_, body) = &zoo()[which];
        let w = body.width(th).min(body.width(th + PI));
        let lam = 0.5 * a * w;
        let (g1, g2) = (body.gamma(th, lam).unwrap(), body.gamma(th + PI, lam).unwrap());
        prop_assert!((g1 - g2).abs() <= 1e-12 * (1.0 + g1));
        let full = body.width(th);
        let (x, y) = (a * full, b * full);
        let mid = body.chord_length(th, 0.5 * (x + y)).unwrap();
        let avg = 0.5 * (body.chord_length(th, x).unwrap() + body.chord_length(th, y).unwrap());
        prop_assert!(mid >= avg - 1e-9);
    }

    #[test]
    fn shortest_diameter_lower_bound(which in 0usize..6, th in 0.0f64..TAU, t in 0.0f64..1.0) {
        let (_, b) = &zoo()[which];
        let (l, s) = b.diameters();
        let rho = 2.0 / s * (1.0 + 50.0 * t);
        let g = b.gamma(th, 1.0 / rho).unwrap();
        prop_assert!(g >= s / l / rho * (1.0 - 1e-12));
    }

    #[test]
    fn portion_is_monotone(which in 0usize..6, start in 0.0f64..TAU, l1 in 0.0f64..TAU, extra in 0.0f64..1.0) {
        let (_, b) = &zoo()[which];
        let i = AngleInterval::new(start, l1);
        let j = AngleInterval::new(start, (l1 + extra * (TAU - l1)).min(TAU));
        prop_assert!(b.portion_of_perimeter(&i) <= b.portion_of_perimeter(&j) + 1e-12);
    }

    #[test]
    fn semi_chords_split_the_chord(which in 0usize..6, th in 0.0f64..TAU, frac in 0.0f64..1.0) {
        let (_, b) = &zoo()[which];
        let sc = b.semi_chords(th, frac * b.width(th)).unwrap();
        prop_assert!((sc.left_len + sc.right_len - sc.base.length).abs() <= 1e-12 * sc.base.length.max(1.0));
        prop_assert!(sc.left_len >= 0.0 && sc.right_len >= 0.0);
    }

    #[test]
    fn psi_in_range(which in 0usize..6) {
        let (_, b) = &zoo()[which];
        let psi = b.angular_trace().psi;
        prop_assert!((0.0..PI).contains(&psi));
    }
}

#[test]
fn disc_chord_through_piece_joint() {
    let d = bodies::disc(Vec2::ZERO, 1.0);
    for th in [0.3, 1.2, -2.0] {
        let lam = 1.0 + 0.3f64.cos();
        let want = 2.0 * (lam * (2.0 - lam)).sqrt();
        assert!((d.chord_length(th, lam).unwrap() - want).abs() < 1e-12);
    }
}
