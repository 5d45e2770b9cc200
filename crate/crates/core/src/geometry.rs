//! Metric and Möbius primitives on the unit disk and the Riemann sphere.
//!
//! Distances follow the disk conventions used throughout the crate:
//!
//! * pseudo-hyperbolic `d_ph(z, w) = |z - w| / |1 - z conj(w)|`, valued in `[0, 1)`;
//! * hyperbolic `d_h = log((1 + d_ph) / (1 - d_ph))`;
//! * chordal `d_S` on the extended plane, valued in `[0, 2]`.
//!
//! Radii of closed disks convert between the first two metrics through
//! `r' = log((1 + r) / (1 - r))`, see [`radius_convert`].

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest admissible modulus is `1 - DISK_MARGIN`.
pub const DISK_MARGIN: f64 = 1e-15;

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint(Complex64 { re: 0.0, im: 0.0 });

    pub fn new(z: Complex64) -> Result<Self> {
        if z.re.is_finite() && z.im.is_finite() && z.norm() < 1.0 - DISK_MARGIN {
            Ok(Self(z))
        } else {
            Err(Error::OutsideDisk { re: z.re, im: z.im })
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    /// Point at modulus `modulus` on the ray of angle `angle`.
    pub fn from_polar(modulus: f64, angle: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(modulus, angle))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.0.norm()
    }

    /// `1 - |z|`, the Euclidean distance to the unit circle.
    #[inline]
    pub fn depth(self) -> f64 {
        1.0 - self.0.norm()
    }

    /// `1 - |z|^2`, factored so that it keeps relative accuracy near the circle.
    #[inline]
    pub fn conformal_weight(self) -> f64 {
        let m = self.0.norm();
        (1.0 - m) * (1.0 + m)
    }
}

impl TryFrom<[f64; 2]> for DiskPoint {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Self::from_parts(v[0], v[1])
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(p: DiskPoint) -> Self {
        [p.0.re, p.0.im]
    }
}

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtendedComplex {
    Finite { re: f64, im: f64 },
    Infinity,
}

impl ExtendedComplex {
    pub const ZERO: ExtendedComplex = ExtendedComplex::Finite { re: 0.0, im: 0.0 };

    pub fn finite(z: Complex64) -> Self {
        ExtendedComplex::Finite { re: z.re, im: z.im }
    }

    /// Maps non-finite complex values to the point at infinity.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            Self::finite(z)
        } else {
            ExtendedComplex::Infinity
        }
    }

    pub fn as_complex(self) -> Option<Complex64> {
        match self {
            ExtendedComplex::Finite { re, im } => Some(Complex64::new(re, im)),
            ExtendedComplex::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    /// Unit vector of the point on the sphere `x^2 + y^2 + z^2 = 1` under
    /// inverse stereographic projection; infinity is the north pole.
    pub fn to_sphere(self) -> [f64; 3] {
        match self.as_complex() {
            None => [0.0, 0.0, 1.0],
            Some(w) => {
                let n2 = w.norm_sqr();
                if !n2.is_finite() {
                    return [0.0, 0.0, 1.0];
                }
                let d = 1.0 + n2;
                [2.0 * w.re / d, 2.0 * w.im / d, (n2 - 1.0) / d]
            }
        }
    }

    /// Inverse of [`ExtendedComplex::to_sphere`]; the argument need not be normalised.
    pub fn from_sphere(v: [f64; 3]) -> Option<Self> {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return None;
        }
        let (x, y, z) = (v[0] / n, v[1] / n, v[2] / n);
        if 1.0 - z <= 1e-300 {
            return Some(ExtendedComplex::Infinity);
        }
        Some(Self::from_complex(Complex64::new(x / (1.0 - z), y / (1.0 - z))))
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

/// `|z - w| / |1 - z conj(w)|`.
pub fn pseudo_hyperbolic_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    let (a, b) = (z.value(), w.value());
    let num = (a - b).norm();
    if num == 0.0 {
        return 0.0;
    }
    let d = num / (Complex64::new(1.0, 0.0) - a * b.conj()).norm();
    d.min(1.0 - f64::EPSILON / 2.0)
}

/// `log((1 + d_ph) / (1 - d_ph))`, evaluated as
/// `2 asinh(|z - w| / sqrt((1 - |z|^2)(1 - |w|^2)))` which is the same
/// quantity without the cancellation in `1 - d_ph` near the circle.
pub fn hyperbolic_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    let num = (z.value() - w.value()).norm();
    if num == 0.0 {
        return 0.0;
    }
    2.0 * (num / (z.conformal_weight() * w.conformal_weight()).sqrt()).asinh()
}

/// Chordal distance on the Riemann sphere.
pub fn spherical_distance(a: ExtendedComplex, b: ExtendedComplex) -> f64 {
    match (a.as_complex(), b.as_complex()) {
        (None, None) => 0.0,
        (Some(z), None) | (None, Some(z)) => 2.0 / 1f64.hypot(z.norm()),
        (Some(z), Some(w)) => {
            let (nz, nw) = (z.norm(), w.norm());
            if nz > 1.0 && nw > 1.0 {
                // d(z, w) = d(1/z, 1/w); scaled to avoid overflow in |z|^2
                let (iz, iw) = ((z.conj() / nz) / nz, (w.conj() / nw) / nw);
                return 2.0 * (iz - iw).norm() / (1f64.hypot(iz.norm()) * 1f64.hypot(iw.norm()));
            }
            2.0 * (z - w).norm() / (1f64.hypot(nz) * 1f64.hypot(nw))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusDirection {
    PhToH,
    HToPh,
}

/// Converts a closed-disk radius between the pseudo-hyperbolic and hyperbolic metrics.
pub fn radius_convert(r: f64, direction: RadiusDirection) -> Result<f64> {
    match direction {
        RadiusDirection::PhToH => {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::OutOfRange { value: r, range: "[0, 1)" });
            }
            Ok(2.0 * r.atanh())
        }
        RadiusDirection::HToPh => {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::OutOfRange { value: r, range: "[0, inf)" });
            }
            Ok((0.5 * r).tanh())
        }
    }
}

/// Shorthand for `radius_convert(r, PhToH)` on a value already known to be valid.
pub(crate) fn ph_to_h(r: f64) -> f64 {
    2.0 * r.atanh()
}

pub(crate) fn h_to_ph(r: f64) -> f64 {
    (0.5 * r).tanh()
}

/// Disk automorphism `z -> e^{i tau} (z + w) / (1 + z conj(w))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusAutomorphism {
    pub center: DiskPoint,
    pub phase: f64,
}

impl MobiusAutomorphism {
    /// The map usually written `phi_w`, sending `0` to `w`.
    pub fn translation(w: DiskPoint) -> Self {
        Self { center: w, phase: 0.0 }
    }

    pub fn new(center: DiskPoint, phase: f64) -> Self {
        Self { center, phase }
    }

    pub fn apply_complex(&self, z: Complex64) -> Complex64 {
        let w = self.center.value();
        let image = (z + w) / (Complex64::new(1.0, 0.0) + z * w.conj());
        Complex64::from_polar(1.0, self.phase) * image
    }

    /// The image stays in the disk up to rounding; points pushed onto the
    /// circle by rounding are pulled back to the admissible boundary layer.
    pub fn apply(&self, z: DiskPoint) -> DiskPoint {
        clamp_into_disk(self.apply_complex(z.value()))
    }

    pub fn inverse(&self) -> Self {
        let rotated = Complex64::from_polar(1.0, self.phase) * self.center.value();
        Self {
            center: DiskPoint(-rotated),
            phase: -self.phase,
        }
    }

    /// `self ∘ other`, returned in normal form.
    pub fn compose(&self, other: &Self) -> Self {
        let b0 = other.apply_complex(Complex64::new(0.0, 0.0));
        let image = self.apply_complex(b0);
        // arg of (self ∘ other)'(0) equals the phase of the normal form
        let phase = (self.derivative(b0) * other.derivative(Complex64::new(0.0, 0.0))).arg();
        let center = clamp_into_disk(Complex64::from_polar(1.0, -phase) * image);
        Self::new(center, phase)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let w = self.center.value();
        let d = Complex64::new(1.0, 0.0) + z * w.conj();
        Complex64::from_polar(self.center.conformal_weight(), self.phase) / (d * d)
    }
}

pub(crate) fn clamp_into_disk(z: Complex64) -> DiskPoint {
    let n = z.norm();
    let limit = 1.0 - 2.0 * DISK_MARGIN;
    if n < limit {
        DiskPoint(z)
    } else {
        DiskPoint(z * (limit / n))
    }
}

/// Fermi coordinates along the diameter ending at `e^{i theta}`: `x` is the
/// signed hyperbolic position of the foot point along the geodesic (origin at
/// `x = 0`) and `y` the signed hyperbolic offset, positive to the left when
/// travelling towards `e^{i theta}`.
pub fn fermi_point(theta: f64, x: f64, y: f64) -> DiskPoint {
    let foot = (0.5 * x).tanh();
    let lateral = Complex64::new(0.0, (0.5 * y).tanh());
    let image = (lateral + foot) / (Complex64::new(1.0, 0.0) + lateral * foot);
    clamp_into_disk(Complex64::from_polar(1.0, theta) * image)
}

/// Signed hyperbolic distance from `z` to the diameter through `e^{i theta}`.
pub fn axis_offset(theta: f64, z: DiskPoint) -> f64 {
    let w = z.value() * Complex64::from_polar(1.0, -theta);
    (2.0 * w.im / z.conformal_weight()).asinh()
}

/// A closed disk in either disk metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicDisk {
    pub center: DiskPoint,
    pub radius: f64,
    pub metric: MetricKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    PseudoHyperbolic,
    Hyperbolic,
}

impl HyperbolicDisk {
    pub fn new(center: DiskPoint, radius: f64, metric: MetricKind) -> Result<Self> {
        let ok = match metric {
            MetricKind::PseudoHyperbolic => (0.0..1.0).contains(&radius),
            MetricKind::Hyperbolic => radius >= 0.0 && radius.is_finite(),
        };
        if !ok {
            return Err(Error::OutOfRange {
                value: radius,
                range: match metric {
                    MetricKind::PseudoHyperbolic => "[0, 1)",
                    MetricKind::Hyperbolic => "[0, inf)",
                },
            });
        }
        Ok(Self { center, radius, metric })
    }

    /// The same closed disk described in the other metric.
    pub fn converted(&self) -> Self {
        match self.metric {
            MetricKind::PseudoHyperbolic => Self {
                center: self.center,
                radius: ph_to_h(self.radius),
                metric: MetricKind::Hyperbolic,
            },
            MetricKind::Hyperbolic => Self {
                center: self.center,
                radius: h_to_ph(self.radius),
                metric: MetricKind::PseudoHyperbolic,
            },
        }
    }

    pub fn contains(&self, z: DiskPoint) -> bool {
        match self.metric {
            MetricKind::PseudoHyperbolic => pseudo_hyperbolic_distance(self.center, z) <= self.radius,
            MetricKind::Hyperbolic => hyperbolic_distance(self.center, z) <= self.radius,
        }
    }

    /// Euclidean centre and radius of the disk (pseudo-hyperbolic disks are
    /// Euclidean disks, with shifted centre).
    pub fn euclidean(&self) -> (Complex64, f64) {
        let r = match self.metric {
            MetricKind::PseudoHyperbolic => self.radius,
            MetricKind::Hyperbolic => h_to_ph(self.radius),
        };
        let w = self.center.value();
        let n2 = w.norm_sqr();
        let denom = 1.0 - r * r * n2;
        (w * ((1.0 - r * r) / denom), r * (1.0 - n2) / denom)
    }
}

/// Uniform sample from the closed Euclidean disk of radius `radius` about the origin.
pub(crate) fn sample_euclidean_disk<R: Rng + ?Sized>(rng: &mut R, center: Complex64, radius: f64) -> Complex64 {
    let rho = radius * rng.gen::<f64>().sqrt();
    let phi = rng.gen::<f64>() * std::f64::consts::TAU;
    center + Complex64::from_polar(rho, phi)
}

/// Sampling check that `phi_w` maps the closed disk `|u| <= r` onto the
/// closed pseudo-hyperbolic disk of radius `r` about `w`, in both directions.
pub fn disk_image_check<R: Rng + ?Sized>(w: DiskPoint, r: f64, samples: usize, rng: &mut R) -> Result<bool> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::OutOfRange { value: r, range: "[0, 1)" });
    }
    const SLACK: f64 = 1e-12;
    let phi = MobiusAutomorphism::translation(w);
    let inverse = phi.inverse();

    for _ in 0..samples {
        let u = sample_euclidean_disk(rng, Complex64::new(0.0, 0.0), r);
        let Ok(u) = DiskPoint::new(u) else { continue };
        if pseudo_hyperbolic_distance(phi.apply(u), w) > r + SLACK {
            return Ok(false);
        }
    }

    // Sample the target disk through its Euclidean description, which does not
    // involve phi_w, and keep only points that satisfy the metric predicate.
    let (c, rad) = HyperbolicDisk::new(w, r, MetricKind::PseudoHyperbolic)?.euclidean();
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < samples && attempts < 4 * samples + 16 {
        attempts += 1;
        let z = sample_euclidean_disk(rng, c, rad);
        let Ok(z) = DiskPoint::new(z) else { continue };
        if pseudo_hyperbolic_distance(z, w) > r {
            continue;
        }
        accepted += 1;
        if inverse.apply(z).norm() > r + SLACK {
            return Ok(false);
        }
    }
    Ok(true)
}
