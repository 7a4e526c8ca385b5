use affdisc::discrepancy::{PointSet, Structure};
use affdisc::pointsets::*;
use affdisc::Vec2;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn torus_close(a: Vec2, b: Vec2) -> bool {
    let d = |x: f64| (x - x.round()).abs();
    d(a.x - b.x) < 1e-12 && d(a.y - b.y) < 1e-12
}

fn assert_fast_path_matches(p: &PointSet, name: &str) {
    let g = p.as_generic();
    for a in -64i64..=64 {
        for b in -64i64..=64 {
            if a * a + b * b > 64 * 64 {
                continue;
            }
            let fast = p.exp_sum((a, b));
            let slow = g.exp_sum((a, b));
            let scale = slow.norm().max(1.0);
            assert!((fast - slow).norm() <= 1e-9 * scale, "{name} m=({a},{b}): {fast} vs {slow}");
        }
    }
}

fn rotated_block(n: u64) -> Result<PointSet, affdisc::discrepancy::PointSetError> {
    rotated_lattice(&RotatedLatticeSpec::new(n, 1, 2)?)
}

#[test]
fn square_lattice_examples() {
    let p = square_lattice(1).unwrap();
    assert_eq!(p.points(), &[Vec2::ZERO]);
    let p = square_lattice(2).unwrap();
    assert_eq!(p.len(), 4);
    assert!(p.points().iter().all(|q| (2.0 * q.x).fract() == 0.0 && (2.0 * q.y).fract() == 0.0));
    let p = square_lattice(8).unwrap();
    for a in -24i64..=24 {
        for b in -24i64..=24 {
            let s = p.as_generic().exp_sum((a, b)).norm();
            if a % 8 == 0 && b % 8 == 0 {
                assert!((s - 64.0).abs() < 1e-9);
            } else {
                assert!(s < 1e-9);
            }
        }
    }
    assert_eq!(p.exp_sum((8, 0)).re, 64.0);
    assert_eq!(p.exp_sum((1, 0)).norm(), 0.0);
}

#[test]
fn rotated_lattice_examples() {
    let spec = RotatedLatticeSpec::new(32, 1, 2).unwrap();
    assert_eq!((spec.g(), spec.l()), (8, 4));
    let p = rotated_lattice(&spec).unwrap();
    assert_eq!(p.len(), 32);
    // index ℓ·G + g
    assert_eq!(p.points()[0], Vec2::ZERO);
    assert!(torus_close(p.points()[8 + 1], Vec2::new(0.375, 0.5)));
    assert!((spec.omega_tilde() - 0.5f64.atan()).abs() < 1e-15);
    assert!(RotatedLatticeSpec::new(10, 2, 4).is_err());

    let s = p.structure().clone();
    for a in -20i64..=20 {
        for b in -20i64..=20 {
            let on = (2 * a + b).rem_euclid(4) == 0 && (2 * b - a).rem_euclid(8) == 0;
            assert_eq!(s.in_support((a, b)), on);
            let v = p.as_generic().exp_sum((a, b)).norm();
            assert!(if on { (v - 32.0).abs() < 1e-9 } else { v < 1e-9 });
        }
    }
}

#[test]
fn rotated_lattice_is_rotated_dilated_grid() {
    let spec = RotatedLatticeSpec::new(5000, 2, 3).unwrap();
    let p = rotated_lattice(&spec).unwrap();
    let (g, l) = (spec.g() as usize, spec.l() as usize);
    let (c, s) = (spec.omega_tilde().cos(), spec.omega_tilde().sin());
    let k = 13f64.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let (a, b) = (rng.random_range(0..l), rng.random_range(0..g));
        let x = a as f64 / l as f64;
        let y = b as f64 / g as f64;
        let want = Vec2::new(k * (c * x - s * y), k * (s * x + c * y));
        assert!(torus_close(p.points()[a * g + b], want));
    }
}

#[test]
fn anisotropic_lattice_examples() {
    let spec = AnisotropicLatticeSpec::new(512, 2.0).unwrap();
    assert_eq!((spec.g(), spec.l()), (32, 16));
    let p = anisotropic_lattice(&spec).unwrap();
    assert_eq!(p.len(), 512);
    for a in -40i64..=40 {
        for b in -40i64..=40 {
            let on = a % 16 == 0 && b % 32 == 0;
            let v = p.as_generic().exp_sum((a, b)).norm();
            assert!(if on { (v - 512.0).abs() < 1e-9 } else { v < 1e-9 });
        }
    }
    let one = anisotropic_lattice(&AnisotropicLatticeSpec::new(1, 2.0).unwrap()).unwrap();
    assert_eq!(one.len(), 1);
    assert!(AnisotropicLatticeSpec::new(4, 1.0).is_err());
}

/// Largest n with ⌊n^a⌋⌊n^b⌋ ≤ rem, by scanning.
fn brute_block(rem: u64, exps: (f64, f64)) -> u64 {
    (1..=4 * rem + 10).filter(|&n| floor_pow(n, exps.0) * floor_pow(n, exps.1) <= rem).max().unwrap_or(0)
}

#[test]
fn composition_examples() {
    let exps = (0.6, 0.4);
    let c = compose_general_n(96, exps, 4, rotated_block).unwrap();
    assert_eq!(c.block_sizes, vec![96]);
    assert_eq!(c.leftover, 0);
    let c = compose_general_n(100, exps, 4, rotated_block).unwrap();
    assert_eq!(c.block_sizes, vec![96, 4]);
    assert_eq!(c.block_params, vec![112, 6]);
    assert_eq!(c.leftover, 0);
    assert_eq!(c.set.len(), 100);
    let c = compose_general_n(1, exps, 4, rotated_block).unwrap();
    assert_eq!(c.set.len(), 1);
    for rem in [1u64, 2, 7, 96, 100, 517, 2024] {
        assert_eq!(largest_block_param(rem, exps), brute_block(rem, exps));
    }
    assert_fast_path_matches(&compose_general_n(100, exps, 4, rotated_block).unwrap().set, "composite");
}

#[test]
fn composition_remainder_bound() {
    let exps = (0.6, 0.4);
    for n in 1..=10_000u64 {
        let c = compose_general_n(n, exps, 4, rotated_block).unwrap();
        assert_eq!(c.set.len() as u64, n);
        let mut rem = n;
        for (j, s) in c.block_sizes.iter().enumerate() {
            rem -= s;
            let bound = 4f64.powi(j as i32 + 1) * (n as f64).powf(0.6f64.powi(j as i32 + 1));
            assert!(rem as f64 <= bound, "N={n} stage {}: {rem} > {bound}", j + 1);
        }
        assert!((c.leftover as f64) <= 256.0 * (n as f64).powf(0.6f64.powi(4)));
    }
}

#[test]
fn fast_paths_match_generic_sums() {
    let sets = [
        ("square", square_lattice(9).unwrap()),
        ("rotated(1,2)", rotated_block(300).unwrap()),
        ("rotated(-3,4)", rotated_lattice(&RotatedLatticeSpec::new(700, -3, 4).unwrap()).unwrap()),
        ("aniso2", anisotropic_lattice(&AnisotropicLatticeSpec::new(512, 2.0).unwrap()).unwrap()),
        ("aniso1.5", anisotropic_lattice(&AnisotropicLatticeSpec::new(300, 1.5).unwrap()).unwrap()),
    ];
    for (name, p) in &sets {
        assert_fast_path_matches(p, name);
        assert_fast_path_matches(&p.translated(Vec2::new(0.3, 0.71)), name);
    }
}

#[test]
fn csv_round_trip_keeps_structure() {
    let p = rotated_block(200).unwrap().translated(Vec2::new(0.1, 0.2));
    let back = PointSet::from_csv(&p.to_csv()).unwrap();
    assert_eq!(back.len(), p.len());
    assert_eq!(back.structure(), p.structure());
    for m in [(1, 2), (5, -7), (10, 3)] {
        assert!((back.exp_sum(m) - p.exp_sum(m)).norm() < 1e-9);
    }
    let g = PointSet::from_csv("x,y\n0.25,0.5\n0.75,0.125\n").unwrap();
    assert_eq!(g.structure(), &Structure::Generic);
    assert_eq!(g.len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructors_return_n_points(n in 1u64..20_000, q1 in -5i64..=5, q2 in 1i64..=5, alpha in 1.1f64..4.0) {
        if let Ok(spec) = RotatedLatticeSpec::new(n, q1, q2) {
            let p = rotated_lattice(&spec).unwrap();
            prop_assert_eq!(p.len() as u64, spec.g() * spec.l());
            prop_assert!(p.points().iter().all(|v| (0.0..1.0).contains(&v.x) && (0.0..1.0).contains(&v.y)));
        }
        let spec = AnisotropicLatticeSpec::new(n, alpha).unwrap();
        prop_assert_eq!(anisotropic_lattice(&spec).unwrap().len() as u64, spec.g() * spec.l());
        let exps = AnisotropicLatticeSpec::exponents(alpha);
        let c = compose_general_n(n, exps, 4, |k| anisotropic_lattice(&AnisotropicLatticeSpec::new(k, alpha)?)).unwrap();
        prop_assert_eq!(c.set.len() as u64, n);
        let k = (n as f64).sqrt() as u64;
        prop_assert_eq!(square_lattice(k.max(1)).unwrap().len() as u64, k.max(1) * k.max(1));
    }
}
