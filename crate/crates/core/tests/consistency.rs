//! Cross-module consistency: cluster limits against renormalized families,
//! normality verdicts on equivalent curves, and bounded moduli.

use std::sync::Arc;

use boundary_lab::analysis::{
    cluster_estimate, normality_sup, renormalized_family_check, AngleRegion, FamilyVerdict, Trend,
};
use boundary_lab::curves::{are_equivalent, canonical_curve, CanonicalKind, CurvilinearAngle, Verdict};
use boundary_lab::functions::{example1_f0, gallery, Example1Schedule, GalleryName};
use boundary_lab::geometry::{spherical_distance, DiskPoint};

fn radial(n: usize) -> Vec<DiskPoint> {
    (1..=n).map(|k| DiskPoint::from_parts(1.0 - (-(k as f64)).exp2(), 0.0).unwrap()).collect()
}

fn angle(kind: CanonicalKind, parameter: f64, r: f64) -> CurvilinearAngle {
    CurvilinearAngle::new(Arc::new(canonical_curve(kind, 0.0, parameter).unwrap()), r).unwrap()
}

#[test]
fn cluster_limit_iff_family_converges_on_gallery() {
    let ws = radial(20);
    for name in GalleryName::ALL {
        let f = gallery(name);
        for r in [0.2, 0.5] {
            let region = AngleRegion::new(angle(CanonicalKind::Radius, 0.0, r), 18);
            let est = cluster_estimate(&f, &region, 0.0, 14, &Default::default()).unwrap();
            match est.limit_candidate {
                Some(c) => {
                    let fam = renormalized_family_check(&f, &ws, r, c).unwrap();
                    assert_eq!(fam.verdict, FamilyVerdict::Converges, "{name} r={r}");
                    let l = fam.limit_candidate.unwrap();
                    assert!(spherical_distance(l, c) < 1e-3, "{name} r={r}");
                }
                None => {
                    let target = f.eval(*ws.last().unwrap()).unwrap();
                    let fam = renormalized_family_check(&f, &ws, r, target).unwrap();
                    assert_ne!(fam.verdict, FamilyVerdict::Converges, "{name} r={r}: {:?}", fam.sup_ds);
                }
            }
        }
    }
}

#[test]
fn square_exp_limit_depends_on_the_angle() {
    // |y| < 1 in 1 - z = t(1 + iy) keeps Re u^2 positive
    let f = gallery(GalleryName::SquareExp);
    let thin = AngleRegion::new(angle(CanonicalKind::Radius, 0.0, 0.2), 18);
    let wide = AngleRegion::new(angle(CanonicalKind::Radius, 0.0, 0.5), 18);
    let a = cluster_estimate(&f, &thin, 0.0, 14, &Default::default()).unwrap();
    let b = cluster_estimate(&f, &wide, 0.0, 14, &Default::default()).unwrap();
    assert!(a.limit_candidate.is_some());
    assert!(b.limit_candidate.is_none());
}

#[test]
fn normality_verdicts_agree_on_equivalent_curves() {
    let radius = canonical_curve(CanonicalKind::Radius, 0.0, 0.0).unwrap();
    let chord = canonical_curve(CanonicalKind::Chord, 0.0, 0.5).unwrap();
    assert_eq!(are_equivalent(&radius, &chord, 12).unwrap().verdict, Verdict::Equivalent);
    for name in GalleryName::ALL {
        let f = gallery(name);
        let a = normality_sup(&f, &angle(CanonicalKind::Radius, 0.0, 0.5), 12, &Default::default()).unwrap();
        let b = normality_sup(&f, &angle(CanonicalKind::Chord, 0.5, 0.5), 12, &Default::default()).unwrap();
        assert_eq!(a.verdict, b.verdict, "{name}");
    }
}

#[test]
fn bounded_modulus_gives_bounded_normality() {
    let s = Arc::new(Example1Schedule::default_schedule(0.0).unwrap());
    let f = example1_f0(s.clone(), s.len()).unwrap();
    for r in [0.2, 0.3, 0.5] {
        let rep = normality_sup(&f, &angle(CanonicalKind::Radius, 0.0, r), 14, &Default::default()).unwrap();
        if rep.levels.iter().all(|l| l.max_log_modulus < 1e3f64.ln()) {
            assert_eq!(rep.verdict, Trend::Bounded, "r={r}");
        }
    }
    let thin = normality_sup(&f, &angle(CanonicalKind::Radius, 0.0, 0.2), 14, &Default::default()).unwrap();
    assert!(thin.levels.iter().all(|l| l.max_log_modulus < 1e3f64.ln()));
}
