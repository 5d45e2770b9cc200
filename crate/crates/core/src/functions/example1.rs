//! A function normal on every curvilinear angle of the radius yet not normal
//! in the disk, and its product with `z - e^{i theta}`.
//!
//! `f0(z) = sum a_k / (z - z_k)` with `a_k = eps_k^2`. The poles alternate
//! between the two boundary curves of `Delta_{r_m}` along the radius, with
//! `r_m = 1 - 2^{-m}`, `m = ceil(k/2)`, and sit at depth `1 - |z_k| = 2^{-k}`.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FunctionHandle, Jet, Meromorphic};
use crate::error::{Error, Result};
use crate::geometry::{axis_offset, fermi_point, DiskPoint};

/// Poles stored by the default schedule; `a_41 = 16^{-41}` is below any
/// quantity the laboratory resolves.
pub const DEFAULT_POLES: usize = 40;
/// `|f0|` above which the reciprocal form is used.
pub const RECIPROCAL_SWITCH: f64 = 1e6;
const POLE_COINCIDENCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Schedule {
    pub theta: f64,
    pub poles: Vec<DiskPoint>,
    /// Disk radii `eps_k`.
    pub radii: Vec<f64>,
    /// Residues `a_k = eps_k^2`.
    pub coefficients: Vec<f64>,
    /// Pseudo-hyperbolic deflections `r_m`, indexed by `m - 1`.
    pub deflections: Vec<f64>,
    /// `m` for each pole.
    pub deflection_index: Vec<usize>,
    /// `+1` on the upper boundary curve, `-1` on the lower.
    pub sides: Vec<i8>,
    /// Depth rule used for the poles.
    pub note: String,
}

/// Outcome of checking the defining conditions on a schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleCheck {
    pub radii_strictly_decreasing: bool,
    pub disks_inside_unit_disk: bool,
    pub disks_pairwise_disjoint: bool,
    pub hyperbolic_diameters_shrink: bool,
    pub radii_summable: bool,
    pub poles_on_boundary_curves: bool,
    pub min_separation_margin: f64,
    pub last_diameter_bound: f64,
    pub radii_sum: f64,
}

impl ScheduleCheck {
    pub fn ok(&self) -> bool {
        self.radii_strictly_decreasing
            && self.disks_inside_unit_disk
            && self.disks_pairwise_disjoint
            && self.hyperbolic_diameters_shrink
            && self.radii_summable
            && self.poles_on_boundary_curves
    }
}

impl Example1Schedule {
    pub fn default_schedule(theta: f64) -> Result<Self> {
        Self::with_count(theta, DEFAULT_POLES)
    }

    /// `eps_k = 4^{-k}`, `r_m = 1 - 2^{-m}`, pole `k` at depth `2^{-k}` on the
    /// upper curve for even `k` and the lower curve for odd `k`.
    pub fn with_count(theta: f64, count: usize) -> Result<Self> {
        if !(1..=45).contains(&count) {
            return Err(Error::InvalidParameter(format!("pole count {count} outside 1..=45")));
        }
        let m_max = count.div_ceil(2);
        let deflections: Vec<f64> = (1..=m_max).map(|m| 1.0 - (-(m as f64)).exp2()).collect();
        let mut poles = Vec::with_capacity(count);
        let mut radii = Vec::with_capacity(count);
        let mut index = Vec::with_capacity(count);
        let mut sides = Vec::with_capacity(count);
        for k in 1..=count {
            let m = k.div_ceil(2);
            let side: i8 = if k % 2 == 0 { 1 } else { -1 };
            // hyperbolic offset of the boundary curve and distance of the pole from 0
            let d = ((m + 1) as f64).exp2() - 1.0;
            let d = d.ln();
            let rho = (((k + 1) as f64).exp2() - 1.0).ln();
            let x = (rho.cosh() / d.cosh()).max(1.0).acosh();
            poles.push(fermi_point(theta, x, side as f64 * d));
            radii.push((-2.0 * k as f64).exp2());
            index.push(m);
            sides.push(side);
        }
        let schedule = Self {
            theta,
            coefficients: radii.iter().map(|e| e * e).collect(),
            poles,
            radii,
            deflections,
            deflection_index: index,
            sides,
            note: "eps_k = 4^-k, a_k = eps_k^2, r_m = 1 - 2^-m with m = ceil(k/2), pole depth 2^-k".into(),
        };
        let check = schedule.check();
        if !check.ok() {
            return Err(Error::InvalidSchedule(format!("{check:?}")));
        }
        Ok(schedule)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::InvalidSchedule(e.to_string()))?;
        let n = s.poles.len();
        if n == 0
            || s.radii.len() != n
            || s.coefficients.len() != n
            || s.sides.len() != n
            || s.deflection_index.len() != n
        {
            return Err(Error::InvalidSchedule("list lengths disagree".into()));
        }
        if s.deflection_index.iter().any(|&m| m == 0 || m > s.deflections.len()) {
            return Err(Error::InvalidSchedule("deflection index out of range".into()));
        }
        let check = s.check();
        if !check.ok() {
            return Err(Error::InvalidSchedule(format!("{check:?}")));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serializes")
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Upper bound for the hyperbolic diameter of `D_k = {|z - z_k| < eps_k}`
    /// (index `k` counts from 1).
    pub fn hyperbolic_diameter_bound(&self, k: usize) -> f64 {
        let z = self.poles[k - 1];
        let eps = self.radii[k - 1];
        let ph = eps / (z.conformal_weight() - eps * z.norm());
        4.0 * ph.atanh()
    }

    /// `sum a_k / (e^{i theta} - z_k)`, the limit of `f0` at the endpoint along
    /// the radius.
    pub fn boundary_value(&self) -> Complex64 {
        let end = Complex64::from_polar(1.0, self.theta);
        self.poles
            .iter()
            .zip(&self.coefficients)
            .map(|(z, a)| *a / (end - z.value()))
            .sum()
    }

    pub fn check(&self) -> ScheduleCheck {
        let n = self.poles.len();
        let radii_strictly_decreasing =
            self.radii.iter().all(|&e| e > 0.0) && self.radii.windows(2).all(|w| w[1] < w[0]);
        let disks_inside_unit_disk = self.poles.iter().zip(&self.radii).all(|(z, e)| *e < z.depth());
        let mut margin = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let gap = (self.poles[i].value() - self.poles[j].value()).norm() - self.radii[i] - self.radii[j];
                margin = margin.min(gap);
            }
        }
        let diameters: Vec<f64> = (1..=n).map(|k| self.hyperbolic_diameter_bound(k)).collect();
        let hyperbolic_diameters_shrink = diameters.iter().all(|d| d.is_finite())
            && diameters.windows(2).all(|w| w[1] <= w[0])
            && diameters.last().is_some_and(|&d| d < 1e-3 || n < 10);
        let radii_summable = self.radii.windows(2).all(|w| w[1] <= 0.5 * w[0]);
        let poles_on_boundary_curves = (0..n).all(|i| {
            let r = self.deflections[self.deflection_index[i] - 1];
            let d = 2.0 * r.atanh();
            let off = axis_offset(self.theta, self.poles[i]);
            (off - self.sides[i] as f64 * d).abs() <= 1e-3
        });
        ScheduleCheck {
            radii_strictly_decreasing,
            disks_inside_unit_disk,
            disks_pairwise_disjoint: margin >= 0.0,
            hyperbolic_diameters_shrink,
            radii_summable,
            poles_on_boundary_curves,
            min_separation_margin: if n > 1 { margin } else { 0.0 },
            last_diameter_bound: diameters.last().copied().unwrap_or(0.0),
            radii_sum: self.radii.iter().sum(),
        }
    }
}

/// Truncation of `f0` to its first `truncation` poles.
pub struct Example1F0 {
    schedule: Arc<Example1Schedule>,
    truncation: usize,
}

impl Example1F0 {
    /// Bound on the terms dropped by the truncation:
    /// the stored poles beyond `K`, plus a geometric remainder for poles not stored.
    pub fn tail_bound(&self, z: DiskPoint) -> f64 {
        let s = &self.schedule;
        let zv = z.value();
        let stored: f64 = (self.truncation..s.len())
            .map(|k| s.coefficients[k] / (zv - s.poles[k].value()).norm())
            .sum();
        let next = s.len() + 1;
        let clearance = z.depth() - (-(next as f64)).exp2();
        let remainder = if clearance > 0.0 {
            // a_k = 16^{-k}: the unstored terms sum to at most a_{N+1} * 16/15
            (-4.0 * next as f64).exp2() * 16.0 / 15.0 / clearance
        } else {
            f64::INFINITY
        };
        stored + remainder
    }

    fn evaluate(&self, zv: Complex64) -> Jet {
        let s = &self.schedule;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut dsum = Complex64::new(0.0, 0.0);
        let mut nearest = 0;
        let mut nearest_dist = f64::INFINITY;
        for k in 0..self.truncation {
            let q = zv - s.poles[k].value();
            let dist = q.norm();
            if dist < nearest_dist {
                nearest_dist = dist;
                nearest = k;
            }
            if dist > POLE_COINCIDENCE {
                let inv = q.inv();
                sum += s.coefficients[k] * inv;
                dsum -= s.coefficients[k] * inv * inv;
            }
        }
        if nearest_dist > POLE_COINCIDENCE && sum.norm() <= RECIPROCAL_SWITCH {
            return Jet::Finite { value: sum, deriv: dsum };
        }
        // 1/f = q / (a + q R) with R the sum of the remaining terms
        let a = s.coefficients[nearest];
        let q = if nearest_dist > POLE_COINCIDENCE {
            zv - s.poles[nearest].value()
        } else {
            Complex64::new(0.0, 0.0)
        };
        let mut rest = Complex64::new(0.0, 0.0);
        let mut drest = Complex64::new(0.0, 0.0);
        for k in (0..self.truncation).filter(|&k| k != nearest) {
            let inv = (zv - s.poles[k].value()).inv();
            rest += s.coefficients[k] * inv;
            drest -= s.coefficients[k] * inv * inv;
        }
        let den = a + q * rest;
        Jet::Reciprocal {
            value: q / den,
            deriv: (a - q * q * drest) / (den * den),
        }
    }
}

impl Meromorphic for Example1F0 {
    fn jet(&self, z: DiskPoint) -> Result<Jet> {
        Ok(self.evaluate(z.value()))
    }

    fn label(&self) -> String {
        format!("example1_f0:{}", self.truncation)
    }
}

struct Example2F1 {
    f0: Example1F0,
    endpoint: Complex64,
}

impl Meromorphic for Example2F1 {
    fn jet(&self, z: DiskPoint) -> Result<Jet> {
        let zv = z.value();
        let e = zv - self.endpoint;
        Ok(match self.f0.evaluate(zv) {
            Jet::Finite { value, deriv } => Jet::Finite {
                value: value * e,
                deriv: deriv * e + value,
            },
            Jet::Reciprocal { value, deriv } => Jet::Reciprocal {
                value: value / e,
                deriv: deriv / e - value / (e * e),
            },
            other => other,
        })
    }

    fn label(&self) -> String {
        format!("example2_f1:{}", self.f0.truncation)
    }
}

fn check_truncation(schedule: &Example1Schedule, truncation: usize) -> Result<()> {
    if truncation == 0 || truncation > schedule.len() {
        return Err(Error::InvalidParameter(format!(
            "truncation {truncation} outside 1..={}",
            schedule.len()
        )));
    }
    Ok(())
}

pub fn example1_f0(schedule: Arc<Example1Schedule>, truncation: usize) -> Result<FunctionHandle> {
    check_truncation(&schedule, truncation)?;
    Ok(FunctionHandle::new(Example1F0 { schedule, truncation }))
}

/// `f1(z) = f0(z) (z - e^{i theta})`.
pub fn example2_f1(schedule: Arc<Example1Schedule>, truncation: usize) -> Result<FunctionHandle> {
    check_truncation(&schedule, truncation)?;
    let endpoint = Complex64::from_polar(1.0, schedule.theta);
    Ok(FunctionHandle::new(Example2F1 {
        f0: Example1F0 { schedule, truncation },
        endpoint,
    }))
}

/// Tail bound of a truncated `f0`, exposed for reports.
pub fn example1_tail_bound(schedule: Arc<Example1Schedule>, truncation: usize, z: DiskPoint) -> Result<f64> {
    check_truncation(&schedule, truncation)?;
    Ok(Example1F0 { schedule, truncation }.tail_bound(z))
}
