use std::sync::Arc;

use boundary_lab::curves::{angle_contains, canonical_curve, discrete_frechet, CanonicalKind, CurvilinearAngle};
use boundary_lab::functions::{gallery, FunctionHandle, GalleryName};
use boundary_lab::geometry::{
    hyperbolic_distance, pseudo_hyperbolic_distance, radius_convert, spherical_distance, DiskPoint, ExtendedComplex,
    MobiusAutomorphism, RadiusDirection,
};
use boundary_lab::stolz::StolzMap;
use num_complex::Complex64;
use proptest::prelude::*;

fn disk_point(max: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..max, 0.0..std::f64::consts::TAU).prop_map(|(r, a)| DiskPoint::from_polar(r, a).unwrap())
}

fn sphere_point() -> impl Strategy<Value = ExtendedComplex> {
    prop_oneof![
        1 => Just(ExtendedComplex::Infinity),
        9 => (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(re, im)| ExtendedComplex::finite(Complex64::new(re, im))),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn pseudo_hyperbolic_axioms(z in disk_point(0.999), w in disk_point(0.999), v in disk_point(0.999)) {
        let d = pseudo_hyperbolic_distance(z, w);
        prop_assert!((0.0..1.0).contains(&d));
        prop_assert_eq!(d, pseudo_hyperbolic_distance(w, z));
        prop_assert_eq!(pseudo_hyperbolic_distance(z, z), 0.0);
        let (a, b) = (pseudo_hyperbolic_distance(z, v), pseudo_hyperbolic_distance(v, w));
        // strong triangle inequality
        prop_assert!(d <= (a + b) / (1.0 + a * b) + 1e-12);
    }

    #[test]
    fn hyperbolic_triangle(z in disk_point(0.99), w in disk_point(0.99), v in disk_point(0.99)) {
        let d = hyperbolic_distance(z, w);
        prop_assert!(d <= hyperbolic_distance(z, v) + hyperbolic_distance(v, w) + 1e-10 * (1.0 + d));
    }

    #[test]
    fn mobius_invariance(z in disk_point(0.99), w in disk_point(0.99), c in disk_point(0.9), phase in 0.0..6.3f64) {
        let m = MobiusAutomorphism::new(c, phase);
        let before = pseudo_hyperbolic_distance(z, w);
        prop_assert!((pseudo_hyperbolic_distance(m.apply(z), m.apply(w)) - before).abs() <= 1e-12);
        let back = m.inverse().apply(m.apply(z));
        prop_assert!((back.value() - z.value()).norm() <= 1e-12);
    }

    #[test]
    fn spherical_metric_axioms(a in sphere_point(), b in sphere_point(), c in sphere_point()) {
        let d = spherical_distance(a, b);
        prop_assert!((0.0..=2.0).contains(&d));
        prop_assert_eq!(d, spherical_distance(b, a));
        prop_assert!(d <= spherical_distance(a, c) + spherical_distance(c, b) + 1e-12);
    }

    #[test]
    fn radius_round_trip(r in 0.0..0.999f64) {
        let h = radius_convert(r, RadiusDirection::PhToH).unwrap();
        prop_assert!((radius_convert(h, RadiusDirection::HToPh).unwrap() - r).abs() <= 1e-12);
    }

    #[test]
    fn reciprocal_keeps_spherical_derivative(z in disk_point(0.95), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let c = DiskPoint::from_parts(re / 4.0, im / 4.0);
        prop_assume!(c.is_ok());
        let f = FunctionHandle::mobius(MobiusAutomorphism::translation(c.unwrap()));
        let a = f.spherical_derivative(z).unwrap();
        let b = f.reciprocal().spherical_derivative(z).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn gallery_reciprocal_invariance(z in disk_point(0.9)) {
        for name in GalleryName::ALL {
            let f = gallery(name);
            let a = f.spherical_derivative(z).unwrap();
            let b = f.reciprocal().spherical_derivative(z).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300), "{name}: {a} vs {b}");
        }
    }

    #[test]
    fn stolz_round_trip(t in 0.05..0.999f64, s in -0.999..0.999f64, alpha in 0.4..1.5f64) {
        let map = StolzMap::new(0.0, alpha).unwrap();
        let z = Complex64::new(1.0, 0.0) - Complex64::from_polar(map.angle.rho * t, s * alpha);
        let w = map.forward(z).unwrap();
        prop_assert!(w.norm() < 1.0);
        prop_assert!((map.inverse(w).unwrap() - z).norm() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn angles_grow_with_deflection(z in disk_point(0.999), r1 in 0.05..0.5f64, extra in 0.01..0.4f64) {
        let curve = Arc::new(canonical_curve(CanonicalKind::Chord, 0.0, 0.3).unwrap());
        let small = CurvilinearAngle::new(curve.clone(), r1).unwrap();
        let large = CurvilinearAngle::new(curve, r1 + extra).unwrap();
        if angle_contains(&small, z, 10) {
            prop_assert!(angle_contains(&large, z, 10));
        }
    }

    #[test]
    fn frechet_dominates_hausdorff(n in 2usize..30, m in 2usize..30, seed in 0u64..1000) {
        let pts = |count: usize, salt: u64| -> Vec<DiskPoint> {
            (0..count)
                .map(|i| {
                    let x = ((i as u64 * 7919 + seed * 31 + salt) % 1000) as f64 / 1000.0;
                    DiskPoint::from_polar(0.9 * x, i as f64 * 0.37 + salt as f64).unwrap()
                })
                .collect()
        };
        let (a, b) = (pts(n, 1), pts(m, 2));
        let f = discrete_frechet(&a, &b).unwrap();
        let directed = |p: &[DiskPoint], q: &[DiskPoint]| {
            p.iter()
                .map(|x| q.iter().map(|y| hyperbolic_distance(*x, *y)).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        prop_assert!(f + 1e-12 >= directed(&a, &b).max(directed(&b, &a)));
        prop_assert!((f - discrete_frechet(&b, &a).unwrap()).abs() <= 1e-12);
    }
}
