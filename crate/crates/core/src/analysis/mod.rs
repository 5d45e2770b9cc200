//! Normality along curves, P-sequence indicators, cluster sets and
//! renormalized families.
//!
//! Everything here samples on fixed grids, so reports are deterministic.
//! The thresholds behind every verdict are recorded in the reports.

mod cluster;
mod family;
mod normality;
mod pseq;

pub use cluster::{cluster_estimate, AngleRegion, ClusterEstimate, ClusterThresholds, PoleRegion, Region, Shell, ShellStatus};
pub use family::{renormalized_family_check, FamilyReport, FamilyVerdict, FAMILY_MESH};
pub use normality::{normality_sup, NormalityLevel, NormalityReport, NormalityThresholds};
pub use pseq::{
    p_indicator_t8, p_indicator_t9, theorem10_check, T8Report, T9Report, Theorem10Report, TREND_THRESHOLDS,
};

use serde::{Deserialize, Serialize};

use crate::geometry::{h_to_ph, DiskPoint, MobiusAutomorphism};
use num_complex::Complex64;

/// Outcome of a growth-trend rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Bounded,
    Diverging,
    Inconclusive,
}

/// Points of the hyperbolic disk of radius `radius` about `center` on
/// concentric rings `mesh` apart, each ring sampled at arc spacing `<= mesh`.
pub(crate) fn ring_grid(center: DiskPoint, radius: f64, mesh: f64) -> Vec<(DiskPoint, Complex64)> {
    let m = MobiusAutomorphism::translation(center);
    let mut out = vec![(center, Complex64::new(0.0, 0.0))];
    if radius <= 0.0 {
        return out;
    }
    let rings = (radius / mesh).ceil().max(1.0) as usize;
    for j in 1..=rings {
        let rho = radius * j as f64 / rings as f64;
        let count = (std::f64::consts::TAU * rho.sinh() / mesh).ceil().max(3.0) as usize;
        let modulus = h_to_ph(rho);
        for i in 0..count {
            let u = Complex64::from_polar(modulus, std::f64::consts::TAU * i as f64 / count as f64);
            out.push((m.apply(DiskPoint::new(u).expect("ring point inside")), u));
        }
    }
    out
}

/// `ceil(log2(1/t))`, at least 1: the first level whose region holds a point of depth `t`.
pub(crate) fn band_of(depth: f64) -> u32 {
    (-depth.log2()).ceil().max(1.0) as u32
}

/// Factor-`growth` increase across each of the last three transitions.
pub(crate) fn grows(values: &[f64], growth: f64) -> bool {
    values.len() >= 4 && values[values.len() - 4..].windows(2).all(|w| w[1] >= growth * w[0] && w[1] > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hyperbolic_distance;

    #[test]
    fn ring_grid_covers_the_disk() {
        let c = DiskPoint::from_parts(0.9, 0.1).unwrap();
        let grid = ring_grid(c, 1.0, 0.1);
        assert!(grid.iter().all(|(z, _)| hyperbolic_distance(*z, c) <= 1.0 + 1e-9));
        // every point of the disk is within the mesh of some grid point
        let m = MobiusAutomorphism::translation(c);
        for k in 0..200 {
            let u = Complex64::from_polar(h_to_ph(0.997 * (k as f64 / 200.0)), k as f64 * 2.4);
            let z = m.apply(DiskPoint::new(u).unwrap());
            let near = grid.iter().map(|(g, _)| hyperbolic_distance(*g, z)).fold(f64::INFINITY, f64::min);
            assert!(near <= 0.1, "{near}");
        }
    }

    #[test]
    fn growth_rule() {
        assert!(grows(&[1.0, 2.0, 4.0, 8.0], 2.0));
        assert!(!grows(&[1.0, 2.0, 3.0, 8.0], 2.0));
        assert!(!grows(&[2.0, 4.0, 8.0], 2.0));
        assert_eq!(band_of(1.0), 1);
        assert_eq!(band_of(0.25), 2);
        assert_eq!(band_of(0.2), 3);
    }
}
