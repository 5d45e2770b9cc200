use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curves::CurvilinearAngle;
use crate::error::{Error, Result};
use crate::functions::{Example1Schedule, FunctionHandle};
use crate::geometry::{spherical_distance, DiskPoint, ExtendedComplex};
use crate::report::{num, Table, Tabular};
use crate::stolz::{GRegion, StolzAngle};

/// A subset of the disk that can be sampled near a boundary point.
pub trait Region: Send + Sync {
    fn contains(&self, z: DiskPoint) -> bool;
    /// Points of the region the grid would miss, such as isolated poles.
    fn extra_points(&self) -> Vec<DiskPoint> {
        Vec::new()
    }
    fn label(&self) -> String;
}

/// A curvilinear angle with the refinement level used for membership.
#[derive(Debug, Clone)]
pub struct AngleRegion {
    pub angle: CurvilinearAngle,
    pub level: u32,
}

impl AngleRegion {
    pub fn new(angle: CurvilinearAngle, level: u32) -> Self {
        Self { angle, level }
    }
}

impl Region for AngleRegion {
    fn contains(&self, z: DiskPoint) -> bool {
        self.angle.contains(z, self.level)
    }

    fn label(&self) -> String {
        format!("delta_{}({})", self.angle.deflection(), self.angle.curve.label())
    }
}

/// A curvilinear angle together with the disks `|z - z_k| < eps_k` of a pole schedule.
#[derive(Debug, Clone)]
pub struct PoleRegion {
    pub angle: AngleRegion,
    pub schedule: Arc<Example1Schedule>,
}

impl Region for PoleRegion {
    fn contains(&self, z: DiskPoint) -> bool {
        self.angle.contains(z)
            || self
                .schedule
                .poles
                .iter()
                .zip(&self.schedule.radii)
                .any(|(p, e)| (p.value() - z.value()).norm() < *e)
    }

    fn extra_points(&self) -> Vec<DiskPoint> {
        self.schedule.poles.clone()
    }

    fn label(&self) -> String {
        format!("{} with pole disks", self.angle.label())
    }
}

impl Region for GRegion {
    fn contains(&self, z: DiskPoint) -> bool {
        GRegion::contains(self, z)
    }

    fn label(&self) -> String {
        format!("g_region(theta={}, alpha={}, rho={})", self.theta, self.alpha, self.rho)
    }
}

impl Region for StolzAngle {
    fn contains(&self, z: DiskPoint) -> bool {
        StolzAngle::contains(self, z)
    }

    fn label(&self) -> String {
        format!("stolz(theta={}, alpha={})", self.theta, self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterThresholds {
    pub diameter: f64,
    pub convergence: f64,
    pub min_points: usize,
    pub max_doublings: u32,
    pub empty_run: usize,
}

impl Default for ClusterThresholds {
    fn default() -> Self {
        Self {
            diameter: 1e-3,
            convergence: 1e-3,
            min_points: 200,
            max_doublings: 4,
            empty_run: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellStatus {
    Sampled,
    Empty,
}

#[derive(Debug, Clone, Serialize)]
pub struct Shell {
    pub index: u32,
    /// `|z - e^{i theta}|` in `[inner, outer)`.
    pub inner: f64,
    pub outer: f64,
    pub status: ShellStatus,
    pub doublings: u32,
    pub failures: usize,
    pub values: Vec<ExtendedComplex>,
    pub diameter: f64,
    pub mean: Option<ExtendedComplex>,
    pub min_to_zero: f64,
    pub min_to_infinity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterEstimate {
    pub function: String,
    pub region: String,
    pub theta: f64,
    pub shells: Vec<Shell>,
    pub diameters: Vec<f64>,
    pub limit_candidate: Option<ExtendedComplex>,
    pub inconclusive: bool,
    pub thresholds: ClusterThresholds,
}

impl Tabular for ClusterEstimate {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "shell", "inner", "outer", "status", "points", "diameter", "mean_re", "mean_im", "mean_infinite", "min_to_zero", "min_to_infinity",
        ]);
        for s in &self.shells {
            let (re, im, inf) = match s.mean {
                Some(ExtendedComplex::Finite { re, im }) => (num(re), num(im), "false"),
                Some(ExtendedComplex::Infinity) => (String::new(), String::new(), "true"),
                None => (String::new(), String::new(), ""),
            };
            t.push([
                s.index.to_string(),
                num(s.inner),
                num(s.outer),
                format!("{:?}", s.status).to_lowercase(),
                s.values.len().to_string(),
                num(s.diameter),
                re,
                im,
                inf.to_string(),
                num(s.min_to_zero),
                num(s.min_to_infinity),
            ]);
        }
        t
    }
}

fn shell_candidates(theta: f64, inner: f64, outer: f64, nt: usize, npsi: usize) -> Vec<DiskPoint> {
    let rot = Complex64::from_polar(1.0, theta);
    let mut out = Vec::with_capacity(nt * npsi);
    for i in 0..nt {
        let t = inner * (outer / inner).powf(i as f64 / nt as f64);
        for j in 0..npsi {
            let psi = -FRAC_PI_2 + std::f64::consts::PI * (j as f64 + 0.5) / npsi as f64;
            let v = Complex64::from_polar(t, psi);
            if t < 2.0 * psi.cos() {
                if let Ok(z) = DiskPoint::new(rot * (Complex64::new(1.0, 0.0) - v)) {
                    out.push(z);
                }
            }
        }
    }
    out
}

/// Samples `f` on `region ∩ {2^-(k+1) <= |z - e^{i theta}| < 2^-k}` for
/// `k = 1..=shells` and proposes a limit when the last shell's spherical
/// diameter and the drift of its mean are both small.
pub fn cluster_estimate(
    f: &FunctionHandle,
    region: &dyn Region,
    theta: f64,
    shells: u32,
    thresholds: &ClusterThresholds,
) -> Result<ClusterEstimate> {
    if shells == 0 {
        return Err(Error::InvalidParameter("cluster_estimate needs at least one shell".into()));
    }
    let end = Complex64::from_polar(1.0, theta);
    let extras = region.extra_points();
    let mut out = Vec::with_capacity(shells as usize);
    for k in 1..=shells {
        let outer = (-(k as f64)).exp2();
        let inner = 0.5 * outer;
        let mut doublings = 0;
        let mut accepted;
        loop {
            let scale = 1usize << doublings;
            let candidates = shell_candidates(theta, inner, outer, 12 * scale, 96 * scale);
            accepted = candidates
                .into_par_iter()
                .filter(|z| region.contains(*z))
                .collect::<Vec<_>>();
            if accepted.len() >= thresholds.min_points || doublings >= thresholds.max_doublings {
                break;
            }
            doublings += 1;
        }
        accepted.extend(extras.iter().filter(|z| {
            let d = (z.value() - end).norm();
            d >= inner && d < outer
        }));
        let raw: Vec<Option<ExtendedComplex>> = accepted.par_iter().map(|z| f.eval(*z).ok()).collect();
        let failures = raw.iter().filter(|v| v.is_none()).count();
        let values: Vec<ExtendedComplex> = raw.into_iter().flatten().collect();
        out.push(summarise(k, inner, outer, doublings, failures, values));
    }

    let mut run = 0;
    let mut inconclusive = false;
    for s in &out {
        run = if s.status == ShellStatus::Empty { run + 1 } else { 0 };
        if run >= thresholds.empty_run {
            inconclusive = true;
        }
    }
    let sampled: Vec<&Shell> = out.iter().filter(|s| s.status == ShellStatus::Sampled).collect();
    let limit_candidate = match sampled.as_slice() {
        [.., prev, last] if !inconclusive && last.diameter < thresholds.diameter => match (prev.mean, last.mean) {
            (Some(a), Some(b)) if spherical_distance(a, b) < thresholds.convergence => Some(b),
            _ => None,
        },
        _ => None,
    };
    Ok(ClusterEstimate {
        function: f.label(),
        region: region.label(),
        theta,
        diameters: out.iter().map(|s| s.diameter).collect(),
        shells: out,
        limit_candidate,
        inconclusive,
        thresholds: *thresholds,
    })
}

fn summarise(index: u32, inner: f64, outer: f64, doublings: u32, failures: usize, values: Vec<ExtendedComplex>) -> Shell {
    let sphere: Vec<[f64; 3]> = values.iter().map(|v| v.to_sphere()).collect();
    let diameter = sphere
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            sphere[i + 1..]
                .iter()
                .map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let mut sum = [0.0; 3];
    for v in &sphere {
        for i in 0..3 {
            sum[i] += v[i];
        }
    }
    let norm = (sum[0] * sum[0] + sum[1] * sum[1] + sum[2] * sum[2]).sqrt();
    let mean = if norm > 1e-12 * sphere.len() as f64 {
        ExtendedComplex::from_sphere([sum[0] / norm, sum[1] / norm, sum[2] / norm])
    } else {
        None
    };
    let zero = ExtendedComplex::ZERO;
    let min_to = |target: ExtendedComplex| values.iter().map(|v| spherical_distance(*v, target)).fold(f64::INFINITY, f64::min);
    Shell {
        index,
        inner,
        outer,
        status: if values.is_empty() { ShellStatus::Empty } else { ShellStatus::Sampled },
        doublings,
        failures,
        min_to_zero: min_to(zero),
        min_to_infinity: min_to(ExtendedComplex::Infinity),
        values,
        diameter,
        mean,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{canonical_curve, CanonicalKind};
    use crate::functions::example2_f1;

    fn radius_region(r: f64, level: u32) -> AngleRegion {
        let c = Arc::new(canonical_curve(CanonicalKind::Radius, 0.0, 0.0).unwrap());
        AngleRegion::new(CurvilinearAngle::new(c, r).unwrap(), level)
    }

    #[test]
    fn identity_tends_to_the_endpoint() {
        let est = cluster_estimate(&FunctionHandle::identity(), &radius_region(0.3, 18), 0.0, 14, &Default::default()).unwrap();
        let c = est.limit_candidate.expect("limit");
        assert!(spherical_distance(c, ExtendedComplex::finite(Complex64::new(1.0, 0.0))) < 1e-3);
        assert!(est.diameters.windows(2).all(|w| w[1] < w[0]));
        assert!(est.shells.iter().all(|s| s.values.len() >= 200));
    }

    #[test]
    fn example2_tends_to_zero_on_a_thin_angle() {
        let s = Arc::new(Example1Schedule::default_schedule(0.0).unwrap());
        let f = example2_f1(s, 40).unwrap();
        let est = cluster_estimate(&f, &radius_region(0.3, 18), 0.0, 14, &Default::default()).unwrap();
        let c = est.limit_candidate.expect("limit");
        assert!(spherical_distance(c, ExtendedComplex::ZERO) < 1e-3, "{c:?}");
    }

    #[test]
    fn poles_add_infinity_to_the_cluster_set() {
        let s = Arc::new(Example1Schedule::default_schedule(0.0).unwrap());
        let f = example2_f1(s.clone(), 40).unwrap();
        let region = PoleRegion {
            angle: radius_region(0.3, 18),
            schedule: s,
        };
        let est = cluster_estimate(&f, &region, 0.0, 14, &Default::default()).unwrap();
        assert!(est.limit_candidate.is_none());
        assert!(est.shells.iter().any(|s| s.min_to_zero < 1e-2 && s.min_to_infinity < 1e-2));
    }

    #[test]
    fn empty_shells_make_the_estimate_inconclusive() {
        struct Nowhere;
        impl Region for Nowhere {
            fn contains(&self, _: DiskPoint) -> bool {
                false
            }
            fn label(&self) -> String {
                "empty".into()
            }
        }
        let est = cluster_estimate(&FunctionHandle::identity(), &Nowhere, 0.0, 4, &Default::default()).unwrap();
        assert!(est.inconclusive && est.limit_candidate.is_none());
        assert!(est.shells.iter().all(|s| s.status == ShellStatus::Empty && s.doublings == 4));
    }
}
