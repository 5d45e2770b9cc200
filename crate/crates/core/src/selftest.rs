//! The acceptance suite as a library: one function per criterion.
//!
//! Each criterion draws from its own seeded stream, so results depend only
//! on the seed. Reports carry measured quantities but no timings.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    cluster_estimate, normality_sup, p_indicator_t9, renormalized_family_check, AngleRegion, FamilyVerdict, PoleRegion, Trend,
};
use crate::curves::{
    angle_contains, are_equivalent, build_lemma4_pair, canonical_curve, directed_curve_distance, discrete_frechet, BoundaryCurve,
    CanonicalKind, CurvilinearAngle, Verdict,
};
use crate::error::Result;
use crate::functions::{example1_f0, example2_f1, gallery, Example1Schedule, FunctionHandle, GalleryName};
use crate::geometry::{
    disk_image_check, hyperbolic_distance, pseudo_hyperbolic_distance, radius_convert, spherical_distance, DiskPoint,
    MobiusAutomorphism, RadiusDirection,
};
use crate::report::{Table, Tabular};
use crate::stolz::{
    decay_margin, lemma6_check, violation_threshold, DecayProfile, DecayVerdict, ProfileKind, StolzMap,
};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub metrics: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub pass: bool,
}

impl Tabular for SelftestReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["criterion", "name", "pass"]);
        for c in &self.criteria {
            t.push([c.id.to_string(), c.name.clone(), c.pass.to_string()]);
        }
        t
    }
}

struct Builder {
    id: u32,
    name: &'static str,
    checks: Vec<bool>,
    metrics: BTreeMap<String, Value>,
}

impl Builder {
    fn new(id: u32, name: &'static str) -> Self {
        Self {
            id,
            name,
            checks: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    fn check(&mut self, key: &str, ok: bool, value: Value) {
        self.checks.push(ok);
        self.metrics.insert(key.to_string(), json!({ "pass": ok, "value": value }));
    }

    fn finish(self) -> CriterionResult {
        CriterionResult {
            id: self.id,
            name: self.name.to_string(),
            pass: !self.checks.is_empty() && self.checks.iter().all(|c| *c),
            metrics: self.metrics,
        }
    }
}

fn stream(seed: u64, id: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

fn random_point<R: Rng>(rng: &mut R, max: f64) -> DiskPoint {
    DiskPoint::from_polar(max * rng.gen::<f64>().sqrt(), rng.gen::<f64>() * std::f64::consts::TAU).expect("inside")
}

fn radius_curve() -> Arc<BoundaryCurve> {
    Arc::new(canonical_curve(CanonicalKind::Radius, 0.0, 0.0).expect("radius"))
}

fn radial_sequence(n: usize) -> Vec<DiskPoint> {
    (1..=n).map(|k| DiskPoint::from_parts(1.0 - (-(k as f64)).exp2(), 0.0).expect("inside")).collect()
}

/// Metric axioms, Möbius invariance and the radius conversion round trip.
pub fn metric_suite(seed: u64) -> CriterionResult {
    let mut b = Builder::new(1, "metric suite");
    let mut rng = stream(seed, 1);
    let (mut sym, mut ident, mut tri, mut inv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut range_ok = true;
    for _ in 0..10_000 {
        let z = random_point(&mut rng, 0.999);
        let w = random_point(&mut rng, 0.999);
        let v = random_point(&mut rng, 0.999);
        let d = pseudo_hyperbolic_distance(z, w);
        range_ok &= (0.0..1.0).contains(&d);
        sym = sym.max((d - pseudo_hyperbolic_distance(w, z)).abs());
        ident = ident.max(pseudo_hyperbolic_distance(z, z));
        let (a, c, e) = (hyperbolic_distance(z, v), hyperbolic_distance(z, w), hyperbolic_distance(w, v));
        tri = tri.max((a - c - e) / (1.0 + a));
        let m = MobiusAutomorphism::new(random_point(&mut rng, 0.9), rng.gen::<f64>() * std::f64::consts::TAU);
        inv = inv.max((pseudo_hyperbolic_distance(m.apply(z), m.apply(w)) - d).abs());
    }
    let mut round = 0.0f64;
    for i in 0..10_000 {
        let r = 0.999 * i as f64 / 10_000.0;
        let h = radius_convert(r, RadiusDirection::PhToH).expect("valid");
        round = round.max((radius_convert(h, RadiusDirection::HToPh).expect("valid") - r).abs());
    }
    b.check("values_in_unit_interval", range_ok, json!(range_ok));
    b.check("symmetry_slack", sym <= 1e-12, json!(sym));
    b.check("identity_slack", ident <= 1e-12, json!(ident));
    b.check("triangle_relative_slack", tri <= 1e-12, json!(tri.max(0.0)));
    b.check("mobius_invariance_slack", inv <= 1e-12, json!(inv));
    b.check("radius_round_trip", round <= 1e-12, json!(round));
    b.finish()
}

/// `phi_w` maps `|u| <= r` onto the pseudo-hyperbolic disk about `w`.
pub fn disk_image_suite(seed: u64) -> CriterionResult {
    let mut b = Builder::new(2, "disk image sampling");
    let mut rng = stream(seed, 2);
    let mut passed = 0;
    for _ in 0..100 {
        let w = random_point(&mut rng, 0.95);
        let r = rng.gen_range(0.05..0.95);
        if disk_image_check(w, r, 10_000, &mut rng).unwrap_or(false) {
            passed += 1;
        }
    }
    b.check("pairs_passed", passed == 100, json!(passed));
    b.finish()
}

/// Reflexive, symmetric and transitive verdicts on non-tangential curves, and
/// the growing distance from the radius to the horocycle.
pub fn equivalence_suite(_seed: u64) -> Result<CriterionResult> {
    let mut b = Builder::new(3, "equivalence relation");
    let curves = [
        canonical_curve(CanonicalKind::Radius, 0.0, 0.0)?,
        canonical_curve(CanonicalKind::Chord, 0.0, -FRAC_PI_4)?,
        canonical_curve(CanonicalKind::Chord, 0.0, FRAC_PI_6)?,
        canonical_curve(CanonicalKind::Chord, 0.0, FRAC_PI_3)?,
        canonical_curve(CanonicalKind::Hypercycle, 0.0, 0.5)?,
        canonical_curve(CanonicalKind::Hypercycle, 0.0, -1.0)?,
    ];
    let n = curves.len();
    let mut verdicts = vec![vec![Verdict::Inconclusive; n]; n];
    for i in 0..n {
        for j in 0..n {
            verdicts[i][j] = are_equivalent(&curves[i], &curves[j], 12)?.verdict;
        }
    }
    let reflexive = (0..n).all(|i| verdicts[i][i] == Verdict::Equivalent);
    let symmetric = (0..n).all(|i| (0..n).all(|j| verdicts[i][j] == verdicts[j][i]));
    let transitive = (0..n).all(|i| {
        (0..n).all(|j| {
            (0..n).all(|k| {
                !(verdicts[i][j] == Verdict::Equivalent && verdicts[j][k] == Verdict::Equivalent)
                    || verdicts[i][k] == Verdict::Equivalent
            })
        })
    });
    let all_equivalent = verdicts.iter().flatten().all(|v| *v == Verdict::Equivalent);
    let labels: Vec<&str> = curves.iter().map(|c| c.label()).collect();
    b.metrics.insert("curves".into(), json!(labels));
    b.metrics.insert("verdicts".into(), json!(verdicts));
    b.check("reflexive", reflexive, json!(reflexive));
    b.check("symmetric", symmetric, json!(symmetric));
    b.check("transitive", transitive, json!(transitive));
    b.check("non_tangential_curves_equivalent", all_equivalent, json!(all_equivalent));

    let horocycle = canonical_curve(CanonicalKind::Horocycle, 0.0, 0.0)?;
    let distances = (4..=12)
        .map(|k| directed_curve_distance(&curves[0], &horocycle, k))
        .collect::<Result<Vec<_>>>()?;
    let increasing = distances.windows(2).all(|w| w[1] > w[0]);
    b.check("radius_to_horocycle_increasing", increasing, json!(distances));
    Ok(b.finish())
}

/// The zigzag curve stays in `Delta_r gamma1` while Fréchet distances grow.
pub fn lemma4_suite(_seed: u64) -> Result<CriterionResult> {
    let mut b = Builder::new(4, "equivalent curves at growing Frechet distance");
    let pair = build_lemma4_pair(0.0, 0.5, 8)?;
    let angle = CurvilinearAngle::new(Arc::new(pair.gamma1.clone()), 0.5)?;
    let levels = [1u32, 2, 4, 8, 12, 16, 24, 32, 40, 48];
    let inside = levels
        .iter()
        .all(|&k| pair.gamma2.refine(k).points.iter().all(|p| angle_contains(&angle, *p, k)));
    b.check("gamma2_inside_angle", inside, json!(levels));
    let frechet = (1..=8)
        .map(|n| {
            let (g1, g2) = pair.prefix(n)?;
            discrete_frechet(&g1, &g2)
        })
        .collect::<Result<Vec<_>>>()?;
    let increasing = frechet.windows(2).all(|w| w[1] > w[0]);
    b.check("frechet_strictly_increasing", increasing, json!(frechet));
    b.check("frechet_exceeds_10_by_5", frechet[4] > 10.0, json!(frechet[4]));
    Ok(b.finish())
}

/// Sups of the Lehto–Virtanen value and the pole-sequence indicator.
pub fn normality_suite(_seed: u64) -> Result<CriterionResult> {
    let mut b = Builder::new(5, "normality");
    let angle = CurvilinearAngle::new(radius_curve(), 0.5)?;
    let th = Default::default();
    let id = normality_sup(&FunctionHandle::identity(), &angle, 14, &th)?;
    let id_sup = id.levels.last().map_or(f64::NAN, |l| l.sup);
    b.check("identity_sup", id_sup <= 1.0 + 1e-9, json!(id_sup));
    let m = MobiusAutomorphism::translation(DiskPoint::from_parts(0.3, 0.0)?);
    let auto = normality_sup(&FunctionHandle::mobius(m), &angle, 14, &th)?;
    let auto_sup = auto.levels.last().map_or(f64::NAN, |l| l.sup);
    b.check("automorphism_sup", auto_sup <= 1.0 + 1e-9, json!(auto_sup));

    let schedule = Arc::new(Example1Schedule::default_schedule(0.0)?);
    let f0 = example1_f0(schedule.clone(), schedule.len())?;
    let rep = normality_sup(&f0, &angle, 14, &th)?;
    let sups: Vec<f64> = rep.levels.iter().filter(|l| l.level >= 4).map(|l| l.sup).collect();
    b.check("example1_bounded", rep.verdict == Trend::Bounded, json!({ "verdict": rep.verdict, "sups": sups }));

    let n = 16;
    let radii: Vec<f64> = (1..=n).map(|k| schedule.hyperbolic_diameter_bound(k)).collect();
    let t9 = p_indicator_t9(&f0, &schedule.poles[..n], &radii)?;
    b.check("pole_sequence_diverging", t9.trend == Trend::Diverging, json!({ "trend": t9.trend, "sups": t9.sups }));
    Ok(b.finish())
}

/// Cluster-set limits on curvilinear angles agree with limits of the
/// renormalized family, and poles add `infinity` to the cluster set.
pub fn consistency_suite(_seed: u64) -> Result<CriterionResult> {
    let mut b = Builder::new(6, "cluster set and renormalized family agree");
    let schedule = Arc::new(Example1Schedule::default_schedule(0.0)?);
    let functions = [FunctionHandle::identity(), example2_f1(schedule.clone(), schedule.len())?];
    let ws = radial_sequence(20);
    for f in &functions {
        for r in [0.2, 0.5] {
            let region = AngleRegion::new(CurvilinearAngle::new(radius_curve(), r)?, 18);
            let est = cluster_estimate(f, &region, 0.0, 14, &Default::default())?;
            let key = format!("{}_r{}", f.label(), r);
            let Some(c) = est.limit_candidate else {
                b.check(&key, false, json!({ "cluster": Value::Null, "diameters": est.diameters }));
                continue;
            };
            let fam = renormalized_family_check(f, &ws, r, c)?;
            let gap = fam.limit_candidate.map_or(f64::INFINITY, |l| spherical_distance(l, c));
            let ok = fam.verdict == FamilyVerdict::Converges && gap < 1e-3;
            b.check(
                &key,
                ok,
                json!({ "cluster": c, "family": fam.limit_candidate, "gap": gap, "last_sup_ds": fam.sup_ds.last() }),
            );
        }
    }
    let region = PoleRegion {
        angle: AngleRegion::new(CurvilinearAngle::new(radius_curve(), 0.3)?, 18),
        schedule: schedule.clone(),
    };
    let est = cluster_estimate(&functions[1], &region, 0.0, 14, &Default::default())?;
    let both: Vec<u32> = est
        .shells
        .iter()
        .filter(|s| s.min_to_zero < 1e-2 && s.min_to_infinity < 1e-2)
        .map(|s| s.index)
        .collect();
    let ok = !both.is_empty() && est.limit_candidate.is_none();
    b.check("two_value_cluster_set", ok, json!({ "shells_with_zero_and_infinity": both }));
    Ok(b.finish())
}

/// Boundary correspondence, closed form, and the distortion bounds.
pub fn stolz_suite(seed: u64) -> Result<CriterionResult> {
    let mut b = Builder::new(7, "Stolz angle map");
    let mut rng = stream(seed, 7);
    let mut corner = 0.0f64;
    let mut vertex = 0.0f64;
    let mut closed = 0.0f64;
    for alpha in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3, 1.2] {
        let map = StolzMap::new(0.0, alpha)?;
        let rho = map.angle.rho;
        let w = map.forward(Complex64::new(1.0 - rho * (1.0 - 1e-13), 0.0))?;
        corner = corner.max((w + 1.0).norm());
        let deep = Complex64::new(1.0 - rho * 1e-12, 0.0);
        vertex = vertex.max(map.one_minus_forward(deep)?.norm());
        for _ in 0..1000 {
            let t = rho * rng.gen_range(0.05..0.999);
            let psi = rng.gen_range(-0.999..0.999) * alpha;
            let z = Complex64::new(1.0, 0.0) - Complex64::from_polar(t, psi);
            closed = closed.max((map.forward(z)? - map.closed_form(z)?).norm());
        }
    }
    b.check("corner_maps_to_minus_one", corner <= 1e-9, json!(corner));
    b.check("vertex_maps_to_one", vertex <= 1e-9, json!(vertex));
    b.check("closed_form_agreement", closed <= 1e-9, json!(closed));
    for alpha in [FRAC_PI_4, FRAC_PI_3] {
        for beta in [FRAC_PI_6, FRAC_PI_4] {
            let rep = lemma6_check(alpha, beta, 10_000, &mut rng)?;
            b.check(
                &format!("distortion_alpha{alpha:.4}_beta{beta:.4}"),
                rep.pass,
                json!({ "m": rep.m_hat, "M": rep.big_m_hat, "holdout_min": rep.holdout_min, "holdout_max": rep.holdout_max }),
            );
        }
    }
    Ok(b.finish())
}

/// Bisection oracle: the depth below which `g` stays negative on `(0, 1]`.
fn threshold_oracle(g: impl Fn(f64) -> f64) -> f64 {
    if g(1.0) < 0.0 && g(1e-300) < 0.0 {
        // no sign change: negative from the start of the curve
        let grid_negative = (0..=1000).all(|i| g((-(i as f64) * 0.7).exp2()) < 0.0);
        if grid_negative {
            return 1.0;
        }
    }
    let (mut lo, mut hi) = (1e-12f64, 1.0f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// The exponential examples against decay profiles.
pub fn decay_suite(_seed: u64) -> Result<CriterionResult> {
    let mut b = Builder::new(8, "decay hypotheses");
    let h = gallery(GalleryName::SaginjanH);
    let mut identity = 0.0f64;
    for i in 0..1000 {
        let r = 1.0 - (-(i as f64) * 0.04).exp2();
        let z = DiskPoint::from_parts(r, 0.0)?;
        identity = identity.max((-h.log_modulus(z)? * (1.0 - r) - 1.0).abs());
    }
    b.check("saginjan_margin_identity", identity <= 1e-9, json!(identity));

    let radius = canonical_curve(CanonicalKind::Radius, 0.0, 0.0)?;
    let log_e = DecayProfile::new(ProfileKind::LogE, 1.0)?;
    let oracle = threshold_oracle(|t| (1.0 - (std::f64::consts::E + 1.0 / t).ln()) / t);
    let found = violation_threshold(&h, &radius, &log_e, 16)?.unwrap_or(f64::NAN);
    b.check(
        "log_e_threshold",
        (found - oracle).abs() <= 1e-6,
        json!({ "threshold": found, "oracle": oracle }),
    );
    let log_inv = DecayProfile::new(ProfileKind::LogInv, 1.0)?;
    let oracle = threshold_oracle(|t| (1.0 + t.ln()) / t);
    let found = violation_threshold(&h, &radius, &log_inv, 16)?.unwrap_or(f64::NAN);
    b.check(
        "log_inverse_threshold",
        (found - oracle).abs() <= 1e-6,
        json!({ "threshold": found, "oracle": oracle }),
    );

    let f = gallery(GalleryName::SquareExp);
    let table = decay_margin(&f, &radius, &DecayProfile::pure_power(2.0)?, 20)?;
    b.check(
        "square_exp_meets_bound",
        table.verdict == DecayVerdict::Satisfied,
        json!({ "verdict": table.verdict, "min_margin": table.min_margin }),
    );
    let angle = CurvilinearAngle::new(radius_curve(), 0.5)?;
    let rep = normality_sup(&f, &angle, 12, &Default::default())?;
    b.check("square_exp_not_normal", rep.verdict == Trend::Diverging, json!(rep.verdict));
    Ok(b.finish())
}

/// Runs criteria 1–8.
pub fn run(seed: u64) -> Result<SelftestReport> {
    let criteria = vec![
        metric_suite(seed),
        disk_image_suite(seed),
        equivalence_suite(seed)?,
        lemma4_suite(seed)?,
        normality_suite(seed)?,
        consistency_suite(seed)?,
        stolz_suite(seed)?,
        decay_suite(seed)?,
    ];
    let pass = criteria.iter().all(|c| c.pass);
    Ok(SelftestReport { seed, criteria, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_handles_both_cases() {
        assert_eq!(threshold_oracle(|t| -1.0 / t), 1.0);
        assert!((threshold_oracle(|t| 1.0 + t.ln()) - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn metric_suite_is_deterministic() {
        let a = serde_json::to_string(&metric_suite(5)).unwrap();
        let b = serde_json::to_string(&metric_suite(5)).unwrap();
        assert_eq!(a, b);
        assert!(metric_suite(5).pass);
    }
}
