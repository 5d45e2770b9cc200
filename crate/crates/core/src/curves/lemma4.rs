//! Two equivalent curves at infinite Fréchet distance.
//!
//! `gamma1` is a geodesic ray through the origin. `gamma2` runs along it but
//! keeps doubling back: it visits anchors `z_1, z_2, w_1, z_3, w_2, ...` where
//! the `z_k` march away quadratically and each `w_{k+1}` sits half a unit past
//! `z_k`. Every excursion back to `w_k` forces any monotone coupling to stretch
//! by about `3k`, while `gamma2` never leaves a thin neighbourhood of `gamma1`.
//!
//! Positions are hyperbolic Fermi coordinates along the diameter. To fit nine
//! anchors into double precision the ray starts far out on the opposite side,
//! at `x = START`.

use serde::{Deserialize, Serialize};

use super::{BoundaryCurve, CurveShape, DEFAULT_MESH};
use crate::error::{Error, Result};
use crate::geometry::{fermi_point, ph_to_h, DiskPoint};

/// Fermi position where `gamma1` begins.
pub const START: f64 = -31.5;
/// `s(z_k) = START + SPACING * k^2`.
pub const SPACING: f64 = 0.75;
/// `s(w_{k+1}) = s(z_k) + BACKSTEP`, and `s(w_1) = START + BACKSTEP`.
pub const BACKSTEP: f64 = 0.5;
/// Lateral offsets approach their cap geometrically with this ratio.
pub const OFFSET_RATIO: f64 = 0.7;
/// Anchors beyond `z_9` are too close to the circle for double precision.
pub const MAX_ZIGZAGS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Markers {
    pub endpoint_angle: f64,
    pub deflection: f64,
    /// Fermi positions of `z_1 ..= z_{n+1}`.
    pub z_positions: Vec<f64>,
    /// Fermi positions of `w_1 ..= w_n`.
    pub w_positions: Vec<f64>,
    /// Visiting order of `gamma2` as `(label, x, y)`.
    pub vertices: Vec<(String, f64, f64)>,
    /// Upper bound of the lateral offset, the hyperbolic radius of half the deflection.
    pub offset_cap: f64,
    pub start: f64,
    pub spacing: f64,
    pub backstep: f64,
    pub offset_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct Lemma4Pair {
    pub gamma1: BoundaryCurve,
    pub gamma2: BoundaryCurve,
    pub markers: Lemma4Markers,
}

/// Builds the pair for pseudo-hyperbolic deflection `r` with `n_zigzags` returns.
pub fn build_lemma4_pair(theta: f64, r: f64, n_zigzags: usize) -> Result<Lemma4Pair> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutOfRange { value: r, range: "(0, 1)" });
    }
    if n_zigzags > MAX_ZIGZAGS {
        return Err(Error::InvalidParameter(format!(
            "at most {MAX_ZIGZAGS} zigzags fit in double precision"
        )));
    }
    let cap = ph_to_h(0.5 * r);
    let z_positions: Vec<f64> = (1..=n_zigzags + 1).map(|k| START + SPACING * (k * k) as f64).collect();
    let w_positions: Vec<f64> = (1..=n_zigzags)
        .map(|k| if k == 1 { START + BACKSTEP } else { z_positions[k - 2] + BACKSTEP })
        .collect();

    let mut order: Vec<(String, f64)> = vec![("z1".into(), z_positions[0])];
    for k in 1..=n_zigzags {
        order.push((format!("z{}", k + 1), z_positions[k]));
        order.push((format!("w{k}"), w_positions[k - 1]));
    }
    let vertices: Vec<(String, f64, f64)> = order
        .into_iter()
        .enumerate()
        .map(|(i, (label, x))| {
            let y = if i == 0 { 0.0 } else { cap * (1.0 - OFFSET_RATIO.powi(i as i32 - 1)) };
            (label, x, y)
        })
        .collect();

    let gamma1 = BoundaryCurve::new(
        theta,
        CurveShape::FermiPath {
            vertices: vec![(START, 0.0), (START + 1.0, 0.0)],
        },
    )?;
    let gamma2 = BoundaryCurve::new(
        theta,
        CurveShape::FermiPath {
            vertices: vertices.iter().map(|(_, x, y)| (*x, *y)).collect(),
        },
    )?;
    Ok(Lemma4Pair {
        gamma1,
        gamma2,
        markers: Lemma4Markers {
            endpoint_angle: theta,
            deflection: r,
            z_positions,
            w_positions,
            vertices,
            offset_cap: cap,
            start: START,
            spacing: SPACING,
            backstep: BACKSTEP,
            offset_ratio: OFFSET_RATIO,
        },
    })
}

impl Lemma4Pair {
    /// Sample lists of the first `n` zigzags: `gamma2` from `z_1` to `w_n`,
    /// and the stretch of `gamma1` it spans, from `w_1` to `z_{n+1}`.
    pub fn prefix(&self, n: usize) -> Result<(Vec<DiskPoint>, Vec<DiskPoint>)> {
        let m = &self.markers;
        if n > m.w_positions.len() {
            return Err(Error::InvalidParameter(format!(
                "prefix {n} exceeds the {} zigzags built",
                m.w_positions.len()
            )));
        }
        let theta = m.endpoint_angle;
        let g2 = fermi_polyline(
            theta,
            &m.vertices[..=2 * n].iter().map(|(_, x, y)| (*x, *y)).collect::<Vec<_>>(),
            DEFAULT_MESH,
        );
        let from = if n == 0 { m.z_positions[0] } else { m.w_positions[0] };
        let g1 = fermi_polyline(theta, &[(from, 0.0), (m.z_positions[n], 0.0)], DEFAULT_MESH);
        Ok((g1, g2))
    }
}

fn fermi_polyline(theta: f64, vertices: &[(f64, f64)], h: f64) -> Vec<DiskPoint> {
    let mut out = vec![fermi_point(theta, vertices[0].0, vertices[0].1)];
    for pair in vertices.windows(2) {
        let ((x0, y0), (x1, y1)) = (pair[0], pair[1]);
        let stretch = y0.abs().max(y1.abs()).cosh();
        let length = ((stretch * (x1 - x0)).powi(2) + (y1 - y0).powi(2)).sqrt();
        let pieces = (length / h).ceil().max(1.0) as usize;
        if length == 0.0 {
            continue;
        }
        for i in 1..=pieces {
            let t = i as f64 / pieces as f64;
            out.push(fermi_point(theta, x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
        }
    }
    out
}
