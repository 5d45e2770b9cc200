use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BoundaryCurve;
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_distance, DiskPoint};
use crate::report::{num, Table, Tabular};

const ENDPOINT_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_endpoints(a: &BoundaryCurve, b: &BoundaryCurve) -> Result<()> {
    let diff = (a.endpoint() - b.endpoint()).norm();
    if diff > ENDPOINT_TOLERANCE {
        return Err(Error::EndpointMismatch {
            first: a.endpoint_angle(),
            second: b.endpoint_angle(),
        });
    }
    Ok(())
}

/// `sup_{z in gamma1} inf_{w in gamma2} d_h(z, w)` with `gamma1` refined to
/// `level` and `gamma2` to `level + 2`.
pub fn directed_curve_distance(gamma1: &BoundaryCurve, gamma2: &BoundaryCurve, level: u32) -> Result<f64> {
    check_endpoints(gamma1, gamma2)?;
    let from = gamma1.refine(level);
    let to = gamma2.refine(level + 2);
    Ok(directed_hausdorff(&from.points, &to.points))
}

pub(crate) fn directed_hausdorff(from: &[DiskPoint], to: &[DiskPoint]) -> f64 {
    from.par_iter()
        .map(|&z| to.iter().map(|&w| hyperbolic_distance(z, w)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelDistance {
    pub level: u32,
    pub forward: f64,
    pub backward: f64,
    pub value: f64,
}

/// Thresholds of the trend rule; recorded in every verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceThresholds {
    /// Largest max/min ratio over the last three levels for `equivalent`.
    pub plateau_ratio: f64,
    /// Number of final levels that must grow strictly for `not_equivalent`.
    pub growth_levels: usize,
    /// Smallest final value for `not_equivalent`.
    pub growth_floor: f64,
}

impl Default for EquivalenceThresholds {
    fn default() -> Self {
        Self {
            plateau_ratio: 1.05,
            growth_levels: 5,
            growth_floor: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub curve1: String,
    pub curve2: String,
    pub levels: Vec<LevelDistance>,
    pub verdict: Verdict,
    pub thresholds: EquivalenceThresholds,
}

impl EquivalenceVerdict {
    pub fn classify(values: &[f64], t: &EquivalenceThresholds) -> Verdict {
        let n = values.len();
        if n >= 3 {
            let tail = &values[n - 3..];
            let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
            if hi <= t.plateau_ratio * lo + 1e-12 {
                return Verdict::Equivalent;
            }
        }
        if n >= t.growth_levels && t.growth_levels >= 2 {
            let tail = &values[n - t.growth_levels..];
            if tail.windows(2).all(|w| w[1] > w[0]) && values[n - 1] > t.growth_floor {
                return Verdict::NotEquivalent;
            }
        }
        Verdict::Inconclusive
    }
}

impl Tabular for EquivalenceVerdict {
    fn table(&self) -> Table {
        let mut t = Table::new(&["level", "value", "forward", "backward", "curve1", "curve2"]);
        for l in &self.levels {
            t.push([
                l.level.to_string(),
                num(l.value),
                num(l.forward),
                num(l.backward),
                self.curve1.clone(),
                self.curve2.clone(),
            ]);
        }
        t
    }
}

/// Runs the directed distance in both directions over levels `1..=max_level`
/// and classifies the per-level maximum.
pub fn are_equivalent(gamma1: &BoundaryCurve, gamma2: &BoundaryCurve, max_level: u32) -> Result<EquivalenceVerdict> {
    are_equivalent_with(gamma1, gamma2, max_level, EquivalenceThresholds::default())
}

pub fn are_equivalent_with(
    gamma1: &BoundaryCurve,
    gamma2: &BoundaryCurve,
    max_level: u32,
    thresholds: EquivalenceThresholds,
) -> Result<EquivalenceVerdict> {
    check_endpoints(gamma1, gamma2)?;
    if max_level == 0 {
        return Err(Error::InvalidParameter("max_level must be at least 1".into()));
    }
    let mut levels = Vec::with_capacity(max_level as usize);
    for k in 1..=max_level {
        let forward = directed_curve_distance(gamma1, gamma2, k)?;
        let backward = directed_curve_distance(gamma2, gamma1, k)?;
        levels.push(LevelDistance {
            level: k,
            forward,
            backward,
            value: forward.max(backward),
        });
    }
    let values: Vec<f64> = levels.iter().map(|l| l.value).collect();
    Ok(EquivalenceVerdict {
        curve1: gamma1.label().to_string(),
        curve2: gamma2.label().to_string(),
        verdict: EquivalenceVerdict::classify(&values, &thresholds),
        levels,
        thresholds,
    })
}

/// Discrete Fréchet distance of two polylines with hyperbolic leg lengths.
///
/// Rolling-row dynamic program: `O(nm)` time, `O(m)` memory.
pub fn discrete_frechet(a: &[DiskPoint], b: &[DiskPoint]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("discrete Fréchet needs non-empty sample lists".into()));
    }
    let m = b.len();
    let mut prev = vec![0.0f64; m];
    let mut row = vec![0.0f64; m];
    for (i, &p) in a.iter().enumerate() {
        for j in 0..m {
            let d = hyperbolic_distance(p, b[j]);
            let reach = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => row[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(row[j - 1]),
            };
            row[j] = d.max(reach);
        }
        std::mem::swap(&mut prev, &mut row);
    }
    Ok(prev[m - 1])
}

/// No two non-adjacent segments of the polyline intersect.
pub fn is_simple(points: &[DiskPoint]) -> bool {
    let n = points.len();
    if n < 4 {
        return n < 3 || !collinear_overlap(points[0], points[1], points[2]);
    }
    let segs: Vec<(DiskPoint, DiskPoint)> = points.windows(2).map(|w| (w[0], w[1])).collect();
    // sweep by the minimum real part of each segment's bounding box
    let mut order: Vec<usize> = (0..segs.len()).collect();
    let lo = |s: &(DiskPoint, DiskPoint)| s.0.value().re.min(s.1.value().re);
    let hi = |s: &(DiskPoint, DiskPoint)| s.0.value().re.max(s.1.value().re);
    order.sort_by(|&i, &j| lo(&segs[i]).total_cmp(&lo(&segs[j])));
    for (pos, &i) in order.iter().enumerate() {
        let right = hi(&segs[i]);
        for &j in &order[pos + 1..] {
            if lo(&segs[j]) > right {
                break;
            }
            let (a, b) = (i.min(j), i.max(j));
            if b == a + 1 {
                if collinear_overlap(points[a], points[a + 1], points[a + 2]) {
                    return false;
                }
                continue;
            }
            if segments_intersect(segs[a], segs[b]) {
                return false;
            }
        }
    }
    true
}

fn cross(o: DiskPoint, a: DiskPoint, b: DiskPoint) -> f64 {
    let (o, a, b) = (o.value(), a.value(), b.value());
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

fn on_segment(p: DiskPoint, a: DiskPoint, b: DiskPoint) -> bool {
    let (p, a, b) = (p.value(), a.value(), b.value());
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

fn segments_intersect(s: (DiskPoint, DiskPoint), t: (DiskPoint, DiskPoint)) -> bool {
    let d1 = cross(t.0, t.1, s.0);
    let d2 = cross(t.0, t.1, s.1);
    let d3 = cross(s.0, s.1, t.0);
    let d4 = cross(s.0, s.1, t.1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(s.0, t.0, t.1))
        || (d2 == 0.0 && on_segment(s.1, t.0, t.1))
        || (d3 == 0.0 && on_segment(t.0, s.0, s.1))
        || (d4 == 0.0 && on_segment(t.1, s.0, s.1))
}

/// Adjacent segments `a-b`, `b-c` fold back onto each other.
fn collinear_overlap(a: DiskPoint, b: DiskPoint, c: DiskPoint) -> bool {
    if cross(a, b, c) != 0.0 {
        return false;
    }
    let (a, b, c) = (a.value(), b.value(), c.value());
    let u = b - a;
    let v = c - b;
    u.re * v.re + u.im * v.im < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{canonical_curve, CanonicalKind};
    use std::f64::consts::FRAC_PI_6;

    fn p(re: f64, im: f64) -> DiskPoint {
        DiskPoint::from_parts(re, im).unwrap()
    }

    /// Enumerates every monotone coupling of two short sequences.
    fn brute_force_frechet(a: &[DiskPoint], b: &[DiskPoint]) -> f64 {
        fn walk(a: &[DiskPoint], b: &[DiskPoint], i: usize, j: usize, acc: f64, best: &mut f64) {
            let acc = acc.max(hyperbolic_distance(a[i], b[j]));
            if acc >= *best {
                return;
            }
            if i + 1 == a.len() && j + 1 == b.len() {
                *best = acc;
                return;
            }
            if i + 1 < a.len() {
                walk(a, b, i + 1, j, acc, best);
            }
            if j + 1 < b.len() {
                walk(a, b, i, j + 1, acc, best);
            }
            if i + 1 < a.len() && j + 1 < b.len() {
                walk(a, b, i + 1, j + 1, acc, best);
            }
        }
        let mut best = f64::INFINITY;
        walk(a, b, 0, 0, 0.0, &mut best);
        best
    }

    #[test]
    fn frechet_matches_coupling_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let n = rng.gen_range(1..6);
            let m = rng.gen_range(1..6);
            let mut gen = |k: usize| -> Vec<DiskPoint> {
                (0..k).map(|_| p(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7))).collect()
            };
            let a = gen(n);
            let b = gen(m);
            let dp = discrete_frechet(&a, &b).unwrap();
            assert!((dp - brute_force_frechet(&a, &b)).abs() <= 1e-12);
        }
    }

    #[test]
    fn frechet_of_identical_lists_is_zero() {
        let c = canonical_curve(CanonicalKind::Horocycle, 0.0, 0.0).unwrap();
        let pts = c.refine(6).points.clone();
        assert_eq!(discrete_frechet(&pts, &pts).unwrap(), 0.0);
        assert!(discrete_frechet(&[], &pts).is_err());
    }

    #[test]
    fn frechet_of_resampled_polyline_is_within_gap() {
        // the same radius sampled at two meshes: every point of one lies within
        // one coarse gap of the other, in order
        let fine: Vec<DiskPoint> = (0..=200).map(|i| crate::geometry::fermi_point(0.0, i as f64 * 0.02, 0.0)).collect();
        let coarse: Vec<DiskPoint> = (0..=40).map(|i| crate::geometry::fermi_point(0.0, i as f64 * 0.1, 0.0)).collect();
        let d = discrete_frechet(&fine, &coarse).unwrap();
        assert!(d <= 0.1 + 1e-12);
    }

    #[test]
    fn frechet_dominates_directed_hausdorff() {
        let a = canonical_curve(CanonicalKind::Chord, 0.0, 0.4).unwrap().refine(5).points.clone();
        let b = canonical_curve(CanonicalKind::Horocycle, 0.0, 0.0).unwrap().refine(5).points.clone();
        let f = discrete_frechet(&a, &b).unwrap();
        assert!(f >= directed_hausdorff(&a, &b));
        assert!(f >= directed_hausdorff(&b, &a));
    }

    #[test]
    fn self_distance_is_zero() {
        let c = canonical_curve(CanonicalKind::Chord, 0.2, 0.3).unwrap();
        for k in [1, 4, 9] {
            assert!(directed_curve_distance(&c, &c, k).unwrap() <= c.refine(k).h_slack);
        }
        let v = are_equivalent(&c, &c, 6).unwrap();
        assert_eq!(v.verdict, Verdict::Equivalent);
    }

    #[test]
    fn endpoint_mismatch_is_rejected() {
        let a = canonical_curve(CanonicalKind::Radius, 0.0, 0.0).unwrap();
        let b = canonical_curve(CanonicalKind::Radius, 0.1, 0.0).unwrap();
        assert!(matches!(
            directed_curve_distance(&a, &b, 3),
            Err(Error::EndpointMismatch { .. })
        ));
        let c = canonical_curve(CanonicalKind::Radius, std::f64::consts::TAU, 0.0).unwrap();
        assert!(directed_curve_distance(&a, &c, 3).is_ok());
    }

    #[test]
    fn radius_and_chord_are_equivalent() {
        let a = canonical_curve(CanonicalKind::Radius, 0.0, 0.0).unwrap();
        let b = canonical_curve(CanonicalKind::Chord, 0.0, FRAC_PI_6).unwrap();
        let v = are_equivalent(&a, &b, 12).unwrap();
        assert_eq!(v.verdict, Verdict::Equivalent);
        // the supremum sits at the origin, at distance d_h(0, 1/2) = log 3 from the chord
        let last = v.levels.last().unwrap().value;
        assert!((last - 3f64.ln()).abs() < 0.03, "{last}");
    }

    #[test]
    fn radius_and_horocycle_separate() {
        let a = canonical_curve(CanonicalKind::Radius, 0.0, 0.0).unwrap();
        let b = canonical_curve(CanonicalKind::Horocycle, 0.0, 0.0).unwrap();
        let v = are_equivalent(&a, &b, 12).unwrap();
        assert_eq!(v.verdict, Verdict::NotEquivalent);
        let forward: Vec<f64> = v.levels.iter().map(|l| l.forward).collect();
        assert!(forward[3..].windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn simplicity_detects_crossings() {
        let square = [p(0.0, 0.0), p(0.5, 0.0), p(0.5, 0.5), p(0.0, 0.5)];
        assert!(is_simple(&square));
        let bowtie = [p(0.0, 0.0), p(0.5, 0.5), p(0.5, 0.0), p(0.0, 0.5)];
        assert!(!is_simple(&bowtie));
        let fold = [p(0.0, 0.0), p(0.5, 0.0), p(0.2, 0.0)];
        assert!(!is_simple(&fold));
        let c = canonical_curve(CanonicalKind::Horocycle, 0.0, 0.0).unwrap();
        assert!(is_simple(&c.refine(10).points));
    }

    #[test]
    fn classification_rules() {
        let t = EquivalenceThresholds::default();
        assert_eq!(EquivalenceVerdict::classify(&[1.0, 1.0, 1.02, 1.03], &t), Verdict::Equivalent);
        assert_eq!(
            EquivalenceVerdict::classify(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &t),
            Verdict::NotEquivalent
        );
        assert_eq!(EquivalenceVerdict::classify(&[1.0, 2.0, 3.0, 4.0, 4.5], &t), Verdict::Inconclusive);
        assert_eq!(EquivalenceVerdict::classify(&[0.0, 0.0, 0.0], &t), Verdict::Equivalent);
    }
}
