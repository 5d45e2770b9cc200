//! Stolz angles and the conformal map of a Stolz angle onto the disk.
//!
//! The map for `A(1, alpha, rho)` is the composition
//!
//! ```text
//! phi1 = -z, phi2 = (1 + z)/rho, phi3 = e^{i alpha} z, phi4 = z^{pi/(2 alpha)},
//! phi5 = (z + 1/z)/2, phi6 = -z, phi7 = (z - i)/(z + i)
//! ```
//!
//! which collapses to `1 - w = 4s / (2 - (s - 1)^2)` with
//! `s = ((1 - z)/rho)^{pi/(2 alpha)}`.

mod decay;
mod lemma6;
mod region;

pub use decay::{
    decay_margin, violation_threshold, DecayProfile, DecayTable, DecayVerdict, MarginRow, ProfileKind,
};
pub use lemma6::{lemma6_check, Lemma6Report};
pub use region::GRegion;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DiskPoint;

/// Radius of the Stolz angle of half-angle `alpha` that still fits in the disk.
pub fn rho_of_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return Err(Error::OutOfRange { value: alpha, range: "(0, pi/2)" });
    }
    Ok(if alpha <= FRAC_PI_3 { 1.0 } else { 2.0 * alpha.cos() })
}

/// `A(e^{i theta}, alpha, rho)`: points `z` of the disk with
/// `|arg(1 - z e^{-i theta})| < alpha` and `|e^{i theta} - z| < rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzAngle {
    pub theta: f64,
    pub alpha: f64,
    pub rho: f64,
}

impl StolzAngle {
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            theta,
            alpha,
            rho: rho_of_alpha(alpha)?,
        })
    }

    /// `1 - z e^{-i theta}`, the offset from the vertex in the normalised frame.
    fn offset(&self, z: Complex64) -> Complex64 {
        Complex64::new(1.0, 0.0) - z * Complex64::from_polar(1.0, -self.theta)
    }

    pub fn contains(&self, z: DiskPoint) -> bool {
        let v = self.offset(z.value());
        v.norm() < self.rho && v.re > 0.0 && v.arg().abs() < self.alpha
    }
}

/// The conformal map of a Stolz angle onto the disk, vertex to `1` and
/// `e^{i theta}(1 - rho)` to `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StolzMap {
    pub angle: StolzAngle,
}

impl StolzMap {
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            angle: StolzAngle::new(theta, alpha)?,
        })
    }

    pub fn exponent(&self) -> f64 {
        FRAC_PI_2 / self.angle.alpha
    }

    fn check(&self, z: Complex64) -> Result<Complex64> {
        let v = self.angle.offset(z);
        if v.norm() < self.angle.rho && v.re > 0.0 && v.arg().abs() < self.angle.alpha {
            Ok(z * Complex64::from_polar(1.0, -self.angle.theta))
        } else {
            Err(Error::OutsideStolzAngle { re: z.re, im: z.im })
        }
    }

    /// The seven intermediate images, `stages[i]` being the output of `phi_{i+1}`.
    pub fn stages(&self, z: Complex64) -> Result<[Complex64; 7]> {
        let a = self.angle.alpha;
        let rho = self.angle.rho;
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let z = self.check(z)?;
        let s1 = -z;
        let s2 = (one + s1) / rho;
        let s3 = Complex64::from_polar(1.0, a) * s2;
        let s4 = s3.powf(self.exponent());
        let s5 = 0.5 * (s4 + s4.inv());
        let s6 = -s5;
        let s7 = (s6 - i) / (s6 + i);
        Ok([s1, s2, s3, s4, s5, s6, s7])
    }

    /// The map by explicit composition.
    pub fn forward(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.stages(z)?[6])
    }

    /// Derived closed form `w = 1 - 4s / (2 - (s - 1)^2)`.
    pub fn closed_form(&self, z: Complex64) -> Result<Complex64> {
        let z = self.check(z)?;
        let s = ((Complex64::new(1.0, 0.0) - z) / self.angle.rho).powf(self.exponent());
        let d = s - 1.0;
        Ok(Complex64::new(1.0, 0.0) - 4.0 * s / (2.0 - d * d))
    }

    /// The closed form with `+` in the denominator,
    /// `w = 1 - 4s / ((s - 1)^2 + 2)`; kept to show it disagrees with the composition.
    pub fn closed_form_plus_variant(&self, z: Complex64) -> Result<Complex64> {
        let z = self.check(z)?;
        let s = ((Complex64::new(1.0, 0.0) - z) / self.angle.rho).powf(self.exponent());
        let d = s - 1.0;
        Ok(Complex64::new(1.0, 0.0) - 4.0 * s / (d * d + 2.0))
    }

    /// `1 - w` without cancellation, for points near the vertex.
    pub fn one_minus_forward(&self, z: Complex64) -> Result<Complex64> {
        let z = self.check(z)?;
        let s = ((Complex64::new(1.0, 0.0) - z) / self.angle.rho).powf(self.exponent());
        let d = s - 1.0;
        Ok(4.0 * s / (2.0 - d * d))
    }

    /// Inverse by reverse composition.
    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        if !(w.norm() < 1.0) {
            return Err(Error::OutsideDisk { re: w.re, im: w.im });
        }
        self.inverse_offset(Complex64::new(1.0, 0.0) - w)
    }

    /// Inverse taking `q = 1 - w`, accurate for `w` close to `1`.
    pub fn inverse_offset(&self, q: Complex64) -> Result<Complex64> {
        let v = self.vertex_offset(q)?;
        Ok((Complex64::new(1.0, 0.0) - v) * Complex64::from_polar(1.0, self.angle.theta))
    }

    /// `1 - z e^{-i theta}` for the preimage `z` of `w = 1 - q`.
    pub fn vertex_offset(&self, q: Complex64) -> Result<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let w = one - q;
        if !(q.norm() > 0.0 && (w.norm() < 1.0 || q.re > 0.0 && q.norm_sqr() < 2.0 * q.re)) {
            return Err(Error::OutsideDisk { re: w.re, im: w.im });
        }
        let a = self.angle.alpha;
        let v6 = i * (2.0 - q) / q;
        let v5 = -v6;
        // of the two roots of v + 1/v = 2 v5, the one inside the unit disk;
        // take the larger one and invert it to avoid cancellation
        let root = (v5 * v5 - 1.0).sqrt();
        let big = if (v5 + root).norm() >= (v5 - root).norm() { v5 + root } else { v5 - root };
        let v4 = big.inv();
        let v3 = v4.powf(1.0 / self.exponent());
        let v2 = v3 * Complex64::from_polar(1.0, -a);
        Ok(self.angle.rho * v2)
    }

    pub fn apply(&self, z: DiskPoint) -> Result<Complex64> {
        self.forward(z.value())
    }
}
