//! Boundary-terminating curves and the distances between them.
//!
//! A [`BoundaryCurve`] is a simple curve in the disk ending at `e^{i theta}`.
//! It is described by a shape and sampled on demand: [`BoundaryCurve::refine`]
//! walks the curve at a fixed hyperbolic mesh and stops at the first sample
//! whose distance to the unit circle is at most `2^{-k}`.

mod angle;
mod distance;
mod lemma4;

pub use angle::{angle_contains, delta_inclusion_check, lemma2_assertion_check, CurvilinearAngle};
pub use distance::{
    are_equivalent, are_equivalent_with, directed_curve_distance, discrete_frechet, is_simple, EquivalenceThresholds,
    EquivalenceVerdict, LevelDistance, Verdict,
};
pub use lemma4::{build_lemma4_pair, Lemma4Markers, Lemma4Pair};

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{clamp_into_disk, fermi_point, hyperbolic_distance, pseudo_hyperbolic_distance, DiskPoint};

/// Hyperbolic spacing between consecutive refined samples.
pub const DEFAULT_MESH: f64 = 0.05;
/// Deepest truncation level; `2^{-48}` is still well above the disk margin.
pub const MAX_LEVEL: u32 = 48;
/// Level used by [`BoundaryCurve::samples`].
pub const DEFAULT_LEVEL: u32 = 8;

const MAX_REFINED_POINTS: usize = 20_000_000;

/// Geometry of a curve, in the frame where the endpoint is `e^{i theta}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveShape {
    /// The geodesic ray from the origin.
    Radius,
    /// The chord `e^{i theta}(1 - t e^{i alpha})`, starting at its point closest to the origin.
    Chord { alpha: f64 },
    /// The equidistant curve at signed hyperbolic offset `offset` from the radius.
    Hypercycle { offset: f64 },
    /// The upper arc of `|z - e^{i theta}/2| = 1/2`, from the origin.
    Horocycle,
    /// Straight segments between Fermi-coordinate vertices `(x, y)`, continued
    /// by the equidistant curve through the last vertex.
    FermiPath { vertices: Vec<(f64, f64)> },
    /// A user polyline, continued by the Euclidean segment to the endpoint.
    Samples { points: Vec<[f64; 2]> },
}

/// Truncated, equidistributed sample list of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub level: u32,
    pub points: Vec<DiskPoint>,
    /// Largest pseudo-hyperbolic gap between adjacent samples.
    pub ph_slack: f64,
    /// Largest hyperbolic gap between adjacent samples.
    pub h_slack: f64,
}

impl Refinement {
    fn new(level: u32, points: Vec<DiskPoint>) -> Self {
        let mut ph_slack: f64 = 0.0;
        let mut h_slack: f64 = 0.0;
        for pair in points.windows(2) {
            ph_slack = ph_slack.max(pseudo_hyperbolic_distance(pair[0], pair[1]));
            h_slack = h_slack.max(hyperbolic_distance(pair[0], pair[1]));
        }
        Self { level, points, ph_slack, h_slack }
    }
}

#[derive(Debug)]
pub struct BoundaryCurve {
    endpoint_angle: f64,
    shape: CurveShape,
    mesh: f64,
    label: String,
    cache: RwLock<HashMap<u32, Arc<Refinement>>>,
}

impl Clone for BoundaryCurve {
    fn clone(&self) -> Self {
        Self {
            endpoint_angle: self.endpoint_angle,
            shape: self.shape.clone(),
            mesh: self.mesh,
            label: self.label.clone(),
            cache: RwLock::new(self.cache.read().map(|c| c.clone()).unwrap_or_default()),
        }
    }
}

impl PartialEq for BoundaryCurve {
    fn eq(&self, other: &Self) -> bool {
        self.endpoint_angle == other.endpoint_angle && self.shape == other.shape && self.mesh == other.mesh
    }
}

/// Serializable description of a curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub endpoint_angle: f64,
    pub shape: CurveShape,
}

/// JSON exchange form: sample pairs plus the endpoint angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveExchange {
    pub endpoint_angle: f64,
    pub samples: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CanonicalKind {
    Radius,
    Chord,
    Hypercycle,
    Horocycle,
}

/// Builds one of the canonical curves ending at `e^{i theta}`.
///
/// `parameter` is the chord angle for chords (in `(-pi/2, pi/2)`), the signed
/// hyperbolic offset for hypercycles, and ignored otherwise.
pub fn canonical_curve(kind: CanonicalKind, theta: f64, parameter: f64) -> Result<BoundaryCurve> {
    let shape = match kind {
        CanonicalKind::Radius => CurveShape::Radius,
        CanonicalKind::Horocycle => CurveShape::Horocycle,
        CanonicalKind::Chord => {
            if !(parameter.abs() < FRAC_PI_2) {
                return Err(Error::OutOfRange { value: parameter, range: "(-pi/2, pi/2)" });
            }
            CurveShape::Chord { alpha: parameter }
        }
        CanonicalKind::Hypercycle => {
            if !parameter.is_finite() || parameter.abs() > 30.0 {
                return Err(Error::OutOfRange { value: parameter, range: "[-30, 30]" });
            }
            CurveShape::Hypercycle { offset: parameter }
        }
    };
    BoundaryCurve::new(theta, shape)
}

impl BoundaryCurve {
    pub fn new(endpoint_angle: f64, shape: CurveShape) -> Result<Self> {
        Self::with_mesh(endpoint_angle, shape, DEFAULT_MESH)
    }

    pub fn with_mesh(endpoint_angle: f64, shape: CurveShape, mesh: f64) -> Result<Self> {
        if !endpoint_angle.is_finite() {
            return Err(Error::InvalidParameter("endpoint angle must be finite".into()));
        }
        if !(mesh > 0.0 && mesh <= 1.0) {
            return Err(Error::OutOfRange { value: mesh, range: "(0, 1]" });
        }
        match &shape {
            CurveShape::FermiPath { vertices } => {
                if vertices.is_empty() || vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::CurveFormat("Fermi path needs finite vertices".into()));
                }
            }
            CurveShape::Samples { points } => {
                if points.is_empty() {
                    return Err(Error::CurveFormat("no samples".into()));
                }
                for p in points {
                    DiskPoint::from_parts(p[0], p[1])?;
                }
                let end = Complex64::from_polar(1.0, endpoint_angle);
                let first = Complex64::new(points[0][0], points[0][1]);
                let last = Complex64::new(points[points.len() - 1][0], points[points.len() - 1][1]);
                if points.len() > 1 && (last - end).norm() > (first - end).norm() {
                    return Err(Error::CurveFormat("samples do not approach the endpoint".into()));
                }
            }
            _ => {}
        }
        let label = shape_label(&shape, endpoint_angle);
        Ok(Self {
            endpoint_angle,
            shape,
            mesh,
            label,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn from_spec(spec: &CurveSpec) -> Result<Self> {
        Self::new(spec.endpoint_angle, spec.shape.clone())
    }

    pub fn spec(&self) -> CurveSpec {
        CurveSpec {
            endpoint_angle: self.endpoint_angle,
            shape: self.shape.clone(),
        }
    }

    pub fn from_exchange(data: &CurveExchange) -> Result<Self> {
        Self::new(
            data.endpoint_angle,
            CurveShape::Samples {
                points: data.samples.clone(),
            },
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let data: CurveExchange = serde_json::from_str(text).map_err(|e| Error::CurveFormat(e.to_string()))?;
        Self::from_exchange(&data)
    }

    pub fn to_exchange(&self, level: u32) -> CurveExchange {
        CurveExchange {
            endpoint_angle: self.endpoint_angle,
            samples: self.refine(level).points.iter().map(|p| [p.value().re, p.value().im]).collect(),
        }
    }

    pub fn endpoint_angle(&self) -> f64 {
        self.endpoint_angle
    }

    pub fn endpoint(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.endpoint_angle)
    }

    pub fn shape(&self) -> &CurveShape {
        &self.shape
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Samples at [`DEFAULT_LEVEL`].
    pub fn samples(&self) -> Vec<DiskPoint> {
        self.refine(DEFAULT_LEVEL).points.clone()
    }

    /// Equidistributed samples up to the first one with `1 - |z| <= 2^{-level}`.
    ///
    /// The depth test only applies inside the unit neighbourhood of the
    /// endpoint, so curves that start near another part of the circle are not
    /// cut short. Levels above [`MAX_LEVEL`] are clamped.
    pub fn refine(&self, level: u32) -> Arc<Refinement> {
        let level = level.clamp(1, MAX_LEVEL);
        if let Some(hit) = self.cache.read().ok().and_then(|c| c.get(&level).cloned()) {
            return hit;
        }
        let computed = Arc::new(Refinement::new(level, self.generate(level)));
        if let Ok(mut cache) = self.cache.write() {
            cache.entry(level).or_insert_with(|| computed.clone()).clone()
        } else {
            computed
        }
    }

    fn generate(&self, level: u32) -> Vec<DiskPoint> {
        let target = (-(level as f64)).exp2();
        let end = self.endpoint();
        let mut out = Vec::new();
        let mut push = |z: DiskPoint| -> bool {
            out.push(z);
            let done = z.depth() <= target && (z.value() - end).norm() < 1.0;
            done || out.len() >= MAX_REFINED_POINTS
        };
        let theta = self.endpoint_angle;
        let h = self.mesh;
        let rot = Complex64::from_polar(1.0, theta);

        match &self.shape {
            CurveShape::Radius => {
                for j in 0.. {
                    if push(fermi_point(theta, j as f64 * h, 0.0)) {
                        break;
                    }
                }
            }
            CurveShape::Hypercycle { offset } => {
                let dx = h / offset.cosh();
                for j in 0.. {
                    if push(fermi_point(theta, j as f64 * dx, *offset)) {
                        break;
                    }
                }
            }
            CurveShape::Chord { alpha } => {
                // hyperbolic arclength s from the point closest to the origin:
                // t(s) = 2c / (e^{cs} + 1) with c = cos(alpha)
                let c = alpha.cos();
                let dir = Complex64::from_polar(1.0, *alpha);
                for j in 0.. {
                    let s = j as f64 * h;
                    let t = 2.0 * c / ((c * s).exp() + 1.0);
                    if push(clamp_into_disk(rot * (Complex64::new(1.0, 0.0) - dir * t))) {
                        break;
                    }
                }
            }
            CurveShape::Horocycle => {
                // z = cos(phi/2) e^{i phi/2}, arclength s = 2 cot(phi/2)
                for j in 0.. {
                    let s = j as f64 * h;
                    let half = (2.0f64).atan2(s);
                    if push(clamp_into_disk(rot * Complex64::from_polar(half.cos(), half))) {
                        break;
                    }
                }
            }
            CurveShape::FermiPath { vertices } => {
                let mut finished = false;
                if push(fermi_point(theta, vertices[0].0, vertices[0].1)) {
                    finished = true;
                }
                for pair in vertices.windows(2) {
                    if finished {
                        break;
                    }
                    let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
                    let stretch = y0.abs().max(y1.abs()).cosh();
                    let length = ((stretch * (x1 - x0)).powi(2) + (y1 - y0).powi(2)).sqrt();
                    let pieces = (length / h).ceil().max(1.0) as usize;
                    for i in 1..=pieces {
                        let t = i as f64 / pieces as f64;
                        if push(fermi_point(theta, x0 + t * (x1 - x0), y0 + t * (y1 - y0))) {
                            finished = true;
                            break;
                        }
                    }
                }
                if !finished {
                    let (x_last, y_last) = vertices[vertices.len() - 1];
                    let dx = h / y_last.cosh();
                    for j in 1.. {
                        if push(fermi_point(theta, x_last + j as f64 * dx, y_last)) {
                            break;
                        }
                    }
                }
            }
            CurveShape::Samples { points } => {
                let pts: Vec<Complex64> = points.iter().map(|p| Complex64::new(p[0], p[1])).collect();
                let mut finished = push(clamp_into_disk(pts[0]));
                for pair in pts.windows(2) {
                    if finished {
                        break;
                    }
                    finished = walk_segment(pair[0], pair[1], h, false, &mut push);
                }
                if !finished {
                    walk_segment(pts[pts.len() - 1], end, h, true, &mut push);
                }
            }
        }
        out
    }
}

/// Walks the Euclidean segment `a -> b` at hyperbolic steps of about `h`,
/// pushing every point after `a`. With `open_end` the endpoint `b` lies on the
/// circle and is never reached; the walk then stops only when `push` says so.
fn walk_segment(
    a: Complex64,
    b: Complex64,
    h: f64,
    open_end: bool,
    push: &mut impl FnMut(DiskPoint) -> bool,
) -> bool {
    let len = (b - a).norm();
    if len == 0.0 {
        return false;
    }
    let mut t = 0.0f64;
    let mut current = clamp_into_disk(a);
    loop {
        let weight = current.conformal_weight();
        let mut dt = (h * weight / (2.0 * len)).max(1e-300);
        let mut next;
        loop {
            let tn = (t + dt).min(1.0);
            next = clamp_into_disk(a + (b - a) * tn);
            if hyperbolic_distance(current, next) <= 1.05 * h || dt < 1e-18 {
                t = tn;
                break;
            }
            dt *= 0.5;
        }
        if !open_end && t >= 1.0 {
            return push(clamp_into_disk(b));
        }
        if push(next) {
            return true;
        }
        if open_end && next == current {
            // rounding has pinned the walk at the disk margin
            return true;
        }
        current = next;
    }
}

fn shape_label(shape: &CurveShape, theta: f64) -> String {
    match shape {
        CurveShape::Radius => format!("radius:{theta}"),
        CurveShape::Chord { alpha } => format!("chord:{theta}:{alpha}"),
        CurveShape::Hypercycle { offset } => format!("hypercycle:{theta}:{offset}"),
        CurveShape::Horocycle => format!("horocycle:{theta}"),
        CurveShape::FermiPath { vertices } => format!("fermi_path:{theta}:{}", vertices.len()),
        CurveShape::Samples { points } => format!("samples:{theta}:{}", points.len()),
    }
}
