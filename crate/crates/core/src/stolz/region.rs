use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::curves::{angle_contains, canonical_curve, CanonicalKind, CurvilinearAngle};
use crate::error::{Error, Result};
use crate::geometry::DiskPoint;

/// `Delta_r gamma ∪ Delta_{alpha,rho} gamma` for the horocycle `gamma` at
/// `e^{i theta}`. The second part is bounded by the horocycle, the chord at
/// angle `alpha` and the arc `|z - e^{i theta}| = rho`; its boundary is included.
#[derive(Debug, Clone)]
pub struct GRegion {
    pub theta: f64,
    pub alpha: f64,
    pub rho: f64,
    pub angle: CurvilinearAngle,
    /// Refinement level used for the curvilinear-angle part.
    pub level: u32,
}

impl Serialize for GRegion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("GRegion", 5)?;
        s.serialize_field("theta", &self.theta)?;
        s.serialize_field("deflection", &self.angle.deflection())?;
        s.serialize_field("alpha", &self.alpha)?;
        s.serialize_field("rho", &self.rho)?;
        s.serialize_field("level", &self.level)?;
        s.end()
    }
}

impl GRegion {
    pub fn new(theta: f64, r: f64, alpha: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < FRAC_PI_2) {
            return Err(Error::OutOfRange { value: alpha, range: "(0, pi/2)" });
        }
        if !(rho > 0.0 && rho <= 2.0) {
            return Err(Error::OutOfRange { value: rho, range: "(0, 2]" });
        }
        let curve = Arc::new(canonical_curve(CanonicalKind::Horocycle, theta, 0.0)?);
        Ok(Self {
            theta,
            alpha,
            rho,
            angle: CurvilinearAngle::new(curve, r)?,
            level: 12,
        })
    }

    pub fn with_level(mut self, level: u32) -> Self {
        self.level = level;
        self
    }

    /// Membership in the part bounded by horocycle, chord and arc.
    ///
    /// With `z = e^{i theta}(1 - t e^{i psi})` the horocycle's upper arc is
    /// `t = cos psi` for `psi in (-pi/2, 0)` and the chord is `psi = alpha`.
    pub fn sector_contains(&self, z: DiskPoint) -> bool {
        let v = Complex64::new(1.0, 0.0) - z.value() * Complex64::from_polar(1.0, -self.theta);
        let t = v.norm();
        if t == 0.0 || t > self.rho {
            return false;
        }
        let psi = v.arg();
        psi <= self.alpha * (1.0 + 1e-12) && (psi >= 0.0 || t <= psi.cos() * (1.0 + 1e-12))
    }

    pub fn contains(&self, z: DiskPoint) -> bool {
        self.sector_contains(z) || angle_contains(&self.angle, z, self.level)
    }
}
