use rayon::prelude::*;
use serde::Serialize;

use super::{grows, ring_grid, Trend};
use crate::error::{Error, Result};
use crate::functions::{lehto_virtanen_value, FunctionHandle};
use crate::geometry::{hyperbolic_distance, spherical_distance, DiskPoint, ExtendedComplex};
use crate::report::{num, Table, Tabular};

/// Levels the Theorem-8 style indicator must eventually exceed.
pub const TREND_THRESHOLDS: [f64; 3] = [10.0, 100.0, 1000.0];
/// A quantity "tends to zero" when its tail stays below this.
const VANISHING: f64 = 1e-3;

/// `(1 - |z_n|^2) f#(z_n)` along a sequence.
#[derive(Debug, Clone, Serialize)]
pub struct T8Report {
    pub function: String,
    pub points: Vec<[f64; 2]>,
    pub values: Vec<f64>,
    /// For each threshold, whether the last three values exceed it.
    pub exceeds: Vec<(f64, bool)>,
    /// Sufficient indicator only: positive when every threshold is eventually exceeded.
    pub indicator: bool,
    pub failures: usize,
}

/// Sup of the Lehto–Virtanen value over `D_h(z_n, r_n)`.
#[derive(Debug, Clone, Serialize)]
pub struct T9Report {
    pub function: String,
    pub points: Vec<[f64; 2]>,
    pub radii: Vec<f64>,
    pub sups: Vec<f64>,
    pub failures: usize,
    pub trend: Trend,
    pub growth: f64,
    pub plateau: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem10Report {
    pub function: String,
    pub alpha: ExtendedComplex,
    pub delta: f64,
    /// `d_S(f(a_n), alpha)`
    pub distance_a: Vec<f64>,
    /// `d_S(f(b_n), alpha)`
    pub distance_b: Vec<f64>,
    /// `d_h(a_n, b_n)`
    pub hyperbolic_gap: Vec<f64>,
    pub condition_i: bool,
    pub condition_ii: bool,
    pub condition_iii: bool,
    /// Both sequences are flagged as P-sequence witnesses.
    pub flagged: bool,
    pub vanishing: f64,
}

fn xy(z: DiskPoint) -> [f64; 2] {
    [z.value().re, z.value().im]
}

fn check_sequence(seq: &[DiskPoint]) -> Result<()> {
    if seq.is_empty() {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    Ok(())
}

pub fn p_indicator_t8(f: &FunctionHandle, sequence: &[DiskPoint]) -> Result<T8Report> {
    check_sequence(sequence)?;
    let raw: Vec<Option<f64>> = sequence.par_iter().map(|z| lehto_virtanen_value(f, *z).ok()).collect();
    let failures = raw.iter().filter(|v| v.is_none()).count();
    let values: Vec<f64> = raw.into_iter().map(|v| v.unwrap_or(f64::NAN)).collect();
    let tail = &values[values.len().saturating_sub(3)..];
    let exceeds: Vec<(f64, bool)> = TREND_THRESHOLDS
        .iter()
        .map(|&t| (t, values.len() >= 3 && tail.iter().all(|v| *v > t)))
        .collect();
    let indicator = exceeds.iter().all(|e| e.1);
    Ok(T8Report {
        function: f.label(),
        points: sequence.iter().map(|z| xy(*z)).collect(),
        values,
        exceeds,
        indicator,
        failures,
    })
}

pub fn p_indicator_t9(f: &FunctionHandle, sequence: &[DiskPoint], radii: &[f64]) -> Result<T9Report> {
    check_sequence(sequence)?;
    if radii.len() != sequence.len() {
        return Err(Error::InvalidParameter("one radius per point is required".into()));
    }
    if radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter("radii must be positive".into()));
    }
    let per: Vec<(f64, usize)> = sequence
        .par_iter()
        .zip(radii.par_iter())
        .map(|(&z, &r)| {
            let mut sup: f64 = 0.0;
            let mut fails = 0;
            for (p, _) in ring_grid(z, r, r / 10.0) {
                match lehto_virtanen_value(f, p) {
                    Ok(v) if !v.is_nan() => sup = sup.max(v),
                    _ => fails += 1,
                }
            }
            (sup, fails)
        })
        .collect();
    let sups: Vec<f64> = per.iter().map(|p| p.0).collect();
    let failures = per.iter().map(|p| p.1).sum();
    let (growth, plateau) = (2.0, 0.05);
    let n = sups.len();
    let trend = if grows(&sups, growth) {
        Trend::Diverging
    } else if n >= 4 && {
        let last = sups[n - 3..].iter().cloned().fold(0.0, f64::max);
        let earlier = sups[..n - 3].iter().cloned().fold(0.0, f64::max);
        last <= (1.0 + plateau) * earlier || last == 0.0
    } {
        Trend::Bounded
    } else {
        Trend::Inconclusive
    };
    Ok(T9Report {
        function: f.label(),
        points: sequence.iter().map(|z| xy(*z)).collect(),
        radii: radii.to_vec(),
        sups,
        failures,
        trend,
        growth,
        plateau,
    })
}

/// Checks the three hypotheses on the last third of the sequences:
/// (i) `d_S(f(a_n), alpha) -> 0`, (ii) `d_S(f(b_n), alpha) >= delta`,
/// (iii) `d_h(a_n, b_n) -> 0`.
pub fn theorem10_check(
    f: &FunctionHandle,
    seq_a: &[DiskPoint],
    seq_b: &[DiskPoint],
    alpha: ExtendedComplex,
    delta: f64,
) -> Result<Theorem10Report> {
    check_sequence(seq_a)?;
    if seq_a.len() != seq_b.len() {
        return Err(Error::InvalidParameter("sequences must have equal length".into()));
    }
    let dist = |seq: &[DiskPoint]| -> Vec<f64> {
        seq.par_iter()
            .map(|z| f.eval(*z).map(|v| spherical_distance(v, alpha)).unwrap_or(f64::NAN))
            .collect()
    };
    let distance_a = dist(seq_a);
    let distance_b = dist(seq_b);
    let hyperbolic_gap: Vec<f64> = seq_a.iter().zip(seq_b).map(|(a, b)| hyperbolic_distance(*a, *b)).collect();
    let n = seq_a.len();
    let start = n - n.div_ceil(3);
    let tail_max = |v: &[f64]| v[start..].iter().cloned().fold(f64::NEG_INFINITY, |a, b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
    let condition_i = tail_max(&distance_a) <= VANISHING;
    let condition_ii = distance_b[start..].iter().all(|d| *d >= delta);
    let condition_iii = tail_max(&hyperbolic_gap) <= VANISHING;
    Ok(Theorem10Report {
        function: f.label(),
        alpha,
        delta,
        distance_a,
        distance_b,
        hyperbolic_gap,
        condition_i,
        condition_ii,
        condition_iii,
        flagged: condition_i && condition_ii && condition_iii,
        vanishing: VANISHING,
    })
}

impl Tabular for T8Report {
    fn table(&self) -> Table {
        let mut t = Table::new(&["index", "re", "im", "value"]);
        for (i, (p, v)) in self.points.iter().zip(&self.values).enumerate() {
            t.push([i.to_string(), num(p[0]), num(p[1]), num(*v)]);
        }
        t
    }
}

impl Tabular for T9Report {
    fn table(&self) -> Table {
        let mut t = Table::new(&["index", "re", "im", "radius", "sup"]);
        for (i, ((p, r), s)) in self.points.iter().zip(&self.radii).zip(&self.sups).enumerate() {
            t.push([i.to_string(), num(p[0]), num(p[1]), num(*r), num(*s)]);
        }
        t
    }
}

impl Tabular for Theorem10Report {
    fn table(&self) -> Table {
        let mut t = Table::new(&["index", "distance_a", "distance_b", "hyperbolic_gap"]);
        for i in 0..self.distance_a.len() {
            t.push([
                i.to_string(),
                num(self.distance_a[i]),
                num(self.distance_b[i]),
                num(self.hyperbolic_gap[i]),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{example1_f0, gallery, Example1Schedule, GalleryName};
    use num_complex::Complex64;
    use std::sync::Arc;

    fn radial(n: usize) -> Vec<DiskPoint> {
        (1..=n).map(|k| DiskPoint::from_parts(1.0 - (-(k as f64)).exp2(), 0.0).unwrap()).collect()
    }

    fn schedule() -> Arc<Example1Schedule> {
        Arc::new(Example1Schedule::default_schedule(0.0).unwrap())
    }

    #[test]
    fn constants_give_zero_indicators() {
        let f = FunctionHandle::constant(Complex64::new(0.5, 0.0));
        let t8 = p_indicator_t8(&f, &radial(10)).unwrap();
        assert!(t8.values.iter().all(|v| *v == 0.0) && !t8.indicator);
        let t9 = p_indicator_t9(&f, &radial(10), &[0.5; 10]).unwrap();
        assert!(t9.sups.iter().all(|v| *v == 0.0));
        assert_eq!(t9.trend, Trend::Bounded);
    }

    #[test]
    fn pole_adjacent_points_are_flagged() {
        let s = schedule();
        let f = example1_f0(s.clone(), 40).unwrap();
        let seq: Vec<DiskPoint> = (0..20)
            .map(|k| {
                let shift = s.coefficients[k] * 1e-3;
                DiskPoint::new(s.poles[k].value() - shift).unwrap()
            })
            .collect();
        let rep = p_indicator_t8(&f, &seq).unwrap();
        assert!(rep.indicator, "{:?}", rep.values);
    }

    #[test]
    fn gavrilov_trend_is_recorded() {
        let rep = p_indicator_t8(&gallery(GalleryName::GavrilovG), &radial(12)).unwrap();
        assert_eq!(rep.values.len(), 12);
    }

    #[test]
    fn pole_sequence_diverges() {
        let s = schedule();
        let f = example1_f0(s.clone(), 40).unwrap();
        let n = 16;
        let radii: Vec<f64> = (1..=n).map(|k| s.hyperbolic_diameter_bound(k)).collect();
        let rep = p_indicator_t9(&f, &s.poles[..n], &radii).unwrap();
        assert_eq!(rep.trend, Trend::Diverging, "{:?}", rep.sups);
    }

    #[test]
    fn identity_is_bounded_by_one() {
        let rep = p_indicator_t9(&FunctionHandle::identity(), &radial(12), &[0.3; 12]).unwrap();
        assert!(rep.sups.iter().all(|v| *v <= 1.0 + 1e-12));
        assert_eq!(rep.trend, Trend::Bounded);
    }

    #[test]
    fn theorem10_on_example1() {
        let s = schedule();
        let f = example1_f0(s.clone(), 40).unwrap();
        // beyond k = 21 the offset eps_k is below the pole-coincidence tolerance
        let n = 20;
        let a: Vec<DiskPoint> = (0..n).map(|k| DiskPoint::new(s.poles[k].value() + s.radii[k]).unwrap()).collect();
        let b = s.poles[..n].to_vec();
        let alpha = ExtendedComplex::from_complex(s.boundary_value());
        let rep = theorem10_check(&f, &a, &b, alpha, 0.1).unwrap();
        assert!(rep.condition_i && rep.condition_ii && rep.condition_iii && rep.flagged, "{rep:?}");

        let same = theorem10_check(&f, &a, &a, alpha, 0.1).unwrap();
        assert!(!same.condition_ii && !same.flagged);
        let c = FunctionHandle::constant(Complex64::new(1.0, 0.0));
        let flat = theorem10_check(&c, &a, &b, ExtendedComplex::finite(Complex64::new(1.0, 0.0)), 0.1).unwrap();
        assert!(!flat.condition_ii && !flat.flagged);
    }
}
