use serde::{Deserialize, Serialize};

use crate::curves::BoundaryCurve;
use crate::error::{Error, Result};
use crate::functions::FunctionHandle;
use crate::geometry::DiskPoint;
use crate::report::{num, Table, Tabular};

/// Relative slack allowed on a margin before it counts as negative.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `p(t) = log(e + 1/t)`
    LogE,
    /// `p(t) = log(1/t)`, positive only for `t < 1`.
    LogInv,
    /// `p(t) = t^{-s}`
    Power { s: f64 },
}

/// The bound `p(t) / t^exponent` a function's `-log|f|` is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub kind: ProfileKind,
    pub exponent: f64,
}

impl DecayProfile {
    pub fn new(kind: ProfileKind, exponent: f64) -> Result<Self> {
        if !(exponent >= 1.0 && exponent.is_finite()) {
            return Err(Error::OutOfRange { value: exponent, range: "[1, inf)" });
        }
        if let ProfileKind::Power { s } = kind {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::OutOfRange { value: s, range: "(0, inf)" });
            }
        }
        let profile = Self { kind, exponent };
        if !profile.is_admissible() {
            return Err(Error::InvalidParameter("profile is not increasing to infinity".into()));
        }
        Ok(profile)
    }

    /// Pure power bound `t^{-total}`, split as `p(t) = t^{-(total-1)/2}`
    /// over `t^{(total+1)/2}`.
    pub fn pure_power(total: f64) -> Result<Self> {
        if !(total > 1.0) {
            return Err(Error::OutOfRange { value: total, range: "(1, inf)" });
        }
        Self::new(ProfileKind::Power { s: 0.5 * (total - 1.0) }, 0.5 * (total + 1.0))
    }

    pub fn p(&self, t: f64) -> f64 {
        match self.kind {
            ProfileKind::LogE => (std::f64::consts::E + t.recip()).ln(),
            ProfileKind::LogInv => -t.ln(),
            ProfileKind::Power { s } => t.powf(-s),
        }
    }

    pub fn bound(&self, t: f64) -> f64 {
        self.p(t) / t.powf(self.exponent)
    }

    /// Monotone decrease on `t = 2^-1 .. 2^-60` and growth by at least a unit.
    pub fn is_admissible(&self) -> bool {
        let values: Vec<f64> = (1..=60).map(|j| self.p((-(j as f64)).exp2())).collect();
        values.windows(2).all(|w| w[1] > w[0]) && values[59] > values[0] + 1.0
    }

    pub fn label(&self) -> String {
        let p = match self.kind {
            ProfileKind::LogE => "log(e+1/t)".to_string(),
            ProfileKind::LogInv => "log(1/t)".to_string(),
            ProfileKind::Power { s } => format!("t^-{s}"),
        };
        format!("{p}/t^{}", self.exponent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayVerdict {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginRow {
    pub index: usize,
    /// `ceil(log2(1/t))`, at least 1.
    pub band: u32,
    pub t: f64,
    pub neg_log_modulus: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub function: String,
    pub curve: String,
    pub profile: DecayProfile,
    pub level: u32,
    pub rows: Vec<MarginRow>,
    pub min_margin: f64,
    pub verdict: DecayVerdict,
}

impl Tabular for DecayTable {
    fn table(&self) -> Table {
        let mut t = Table::new(&["band", "margin", "index", "t", "neg_log_modulus", "bound", "profile"]);
        let label = self.profile.label();
        for r in &self.rows {
            t.push([
                r.band.to_string(),
                num(r.margin),
                r.index.to_string(),
                num(r.t),
                num(r.neg_log_modulus),
                num(r.bound),
                label.clone(),
            ]);
        }
        t
    }
}

fn band_of(t: f64) -> u32 {
    (-t.log2()).ceil().max(1.0) as u32
}

fn negative(row: &MarginRow) -> bool {
    let scale = row.neg_log_modulus.abs().max(row.bound.abs());
    let slack = if scale.is_finite() { MARGIN_TOLERANCE * scale } else { 0.0 };
    row.margin.is_nan() || row.margin < -slack
}

fn row_at(f: &FunctionHandle, profile: &DecayProfile, index: usize, z: DiskPoint) -> Result<MarginRow> {
    let t = z.depth();
    let neg_log_modulus = -f.log_modulus(z)?;
    let bound = profile.bound(t);
    let margin = if neg_log_modulus == f64::INFINITY { f64::INFINITY } else { neg_log_modulus - bound };
    Ok(MarginRow {
        index,
        band: band_of(t),
        t,
        neg_log_modulus,
        bound,
        margin,
    })
}

/// Tabulates `-log|f(z)| - p(t)/t^e`, `t = 1 - |z|`, along `refine(level)`.
///
/// Satisfied when every sample past the first band is non-negative, violated
/// when every sample of the last two bands is negative or `f` has a pole on
/// the curve.
pub fn decay_margin(f: &FunctionHandle, curve: &BoundaryCurve, profile: &DecayProfile, level: u32) -> Result<DecayTable> {
    let refinement = curve.refine(level);
    let rows = refinement
        .points
        .iter()
        .enumerate()
        .map(|(i, z)| row_at(f, profile, i, *z))
        .collect::<Result<Vec<_>>>()?;
    let level = refinement.level;
    let min_margin = rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let pole = rows.iter().any(|r| r.neg_log_modulus == f64::NEG_INFINITY);
    let satisfied = rows.iter().filter(|r| r.band >= 2).all(|r| !negative(r));
    let tail: Vec<&MarginRow> = rows.iter().filter(|r| r.band + 1 >= level).collect();
    let violated = !tail.is_empty() && tail.iter().all(|r| negative(r));
    let verdict = if pole || (violated && !satisfied) {
        DecayVerdict::Violated
    } else if satisfied {
        DecayVerdict::Satisfied
    } else {
        DecayVerdict::Inconclusive
    };
    Ok(DecayTable {
        function: f.label(),
        curve: curve.label().to_string(),
        profile: *profile,
        level,
        rows,
        min_margin,
        verdict,
    })
}

/// The depth `t` below which the margin stays negative along the curve, or
/// `None` if the last sample is not negative. When every sample is negative
/// this is the depth of the first sample.
pub fn violation_threshold(
    f: &FunctionHandle,
    curve: &BoundaryCurve,
    profile: &DecayProfile,
    level: u32,
) -> Result<Option<f64>> {
    let points = curve.refine(level).points.clone();
    let rows = points
        .iter()
        .enumerate()
        .map(|(i, z)| row_at(f, profile, i, *z))
        .collect::<Result<Vec<_>>>()?;
    let Some(last) = rows.last() else { return Ok(None) };
    if !negative(last) {
        return Ok(None);
    }
    let Some(i) = rows.iter().rposition(|r| !negative(r)) else {
        return Ok(Some(rows[0].t));
    };
    let (a, b) = (points[i].value(), points[i + 1].value());
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let z = DiskPoint::new(a + (b - a) * mid)?;
        if negative(&row_at(f, profile, 0, z)?) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(DiskPoint::new(a + (b - a) * hi)?.depth()))
}
