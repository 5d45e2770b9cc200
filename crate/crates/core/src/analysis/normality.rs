use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{band_of, ring_grid, Trend};
use crate::curves::CurvilinearAngle;
use crate::error::{Error, Result};
use crate::functions::{log_lehto_virtanen_value, FunctionHandle};
use crate::geometry::{DiskPoint, MobiusAutomorphism};
use crate::report::{num, Table, Tabular};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityThresholds {
    /// Bounded when the last three sups are within this relative spread.
    pub plateau: f64,
    /// Diverging when each of the last three transitions grows by this factor.
    pub growth: f64,
    /// Inconclusive when more than this fraction of evaluations fail.
    pub failure_fraction: f64,
    /// Hyperbolic mesh of the ring grid around each cover center.
    pub mesh: f64,
    /// Local search stops at this step in disk coordinates.
    pub search_floor: f64,
}

impl Default for NormalityThresholds {
    fn default() -> Self {
        Self {
            plateau: 0.05,
            growth: 2.0,
            failure_fraction: 0.01,
            mesh: 0.1,
            search_floor: 1e-13,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityLevel {
    pub level: u32,
    /// `sup (1 - |z|^2) f#(z)` over sampled points with `1 - |z| >= 2^-level`.
    pub sup: f64,
    pub log_sup: f64,
    pub argmax: [f64; 2],
    pub samples: usize,
    /// Largest `log |f|` on the ring grids up to this level.
    pub max_log_modulus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalityReport {
    pub function: String,
    pub region: CurvilinearAngle,
    pub max_level: u32,
    pub cover_level: u32,
    pub levels: Vec<NormalityLevel>,
    pub evaluations: usize,
    pub failures: usize,
    pub verdict: Trend,
    pub thresholds: NormalityThresholds,
}

impl Tabular for NormalityReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&[
            "level", "sup", "log_sup", "argmax_re", "argmax_im", "samples", "max_log_modulus", "function", "deflection",
        ]);
        for l in &self.levels {
            t.push([
                l.level.to_string(),
                num(l.sup),
                num(l.log_sup),
                num(l.argmax[0]),
                num(l.argmax[1]),
                l.samples.to_string(),
                num(l.max_log_modulus),
                self.function.clone(),
                num(self.region.deflection()),
            ]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    log_value: f64,
    center: usize,
    local: Complex64,
    point: DiskPoint,
}

/// Sup of the Lehto–Virtanen value `(1 - |z|^2) f#(z)` over `Delta_r gamma`,
/// cumulatively by level.
///
/// The angle is covered by pseudo-hyperbolic disks of radius `r` about the
/// refined curve, each sampled on a ring grid; the best three samples of each
/// depth band are then polished by a compass search inside their disk.
pub fn normality_sup(
    f: &FunctionHandle,
    region: &CurvilinearAngle,
    max_level: u32,
    thresholds: &NormalityThresholds,
) -> Result<NormalityReport> {
    if max_level < 4 {
        return Err(Error::InvalidParameter("normality_sup needs max_level >= 4".into()));
    }
    let r = region.deflection();
    let radius = region.hyperbolic_deflection();
    let extra = (2.0 * radius.cosh()).log2().ceil() as u32;
    let cover_level = max_level + extra;
    let centers = region.curve.refine(cover_level).points.clone();

    let evaluate = |z: DiskPoint| log_lehto_virtanen_value(f, z).ok().filter(|v| !v.is_nan());

    let per_center: Vec<(Vec<Sample>, usize, usize, Vec<f64>)> = centers
        .par_iter()
        .enumerate()
        .map(|(ci, &c)| {
            let mut out = Vec::new();
            let mut evals = 0;
            let mut fails = 0;
            let mut modulus = vec![f64::NEG_INFINITY; max_level as usize + 1];
            for (z, u) in ring_grid(c, radius, thresholds.mesh) {
                let band = band_of(z.depth());
                if band > max_level {
                    continue;
                }
                evals += 1;
                let jet = f.jet(z);
                if let Ok(j) = &jet {
                    let m = &mut modulus[band as usize];
                    *m = m.max(j.log_modulus());
                }
                let value = jet
                    .ok()
                    .map(|j| z.conformal_weight().ln() + j.log_spherical_derivative())
                    .filter(|v| !v.is_nan());
                match value {
                    Some(v) => out.push(Sample {
                        log_value: v,
                        center: ci,
                        local: u,
                        point: z,
                    }),
                    None => fails += 1,
                }
            }
            (out, evals, fails, modulus)
        })
        .collect();

    let mut evaluations = 0;
    let mut band_modulus = vec![f64::NEG_INFINITY; max_level as usize + 1];
    let mut failures = 0;
    let mut bands: Vec<Vec<Sample>> = vec![Vec::new(); max_level as usize + 1];
    let mut counts = vec![0usize; max_level as usize + 1];
    for (samples, e, fl, modulus) in per_center {
        evaluations += e;
        failures += fl;
        for (b, m) in band_modulus.iter_mut().zip(modulus) {
            *b = b.max(m);
        }
        for s in samples {
            let b = band_of(s.point.depth()) as usize;
            counts[b] += 1;
            bands[b].push(s);
        }
    }

    // sups over a truncated region often sit on its depth boundary
    let edges: Vec<(Vec<Sample>, usize, usize)> = (1..=max_level)
        .into_par_iter()
        .map(|k| edge_search(k, &centers, r, &evaluate))
        .collect();
    for (samples, e, fl) in edges {
        evaluations += e;
        failures += fl;
        for s in samples {
            let b = band_of(s.point.depth()) as usize;
            if b <= max_level as usize {
                bands[b].push(s);
            }
        }
    }

    // polish the best seeds of every band
    let seeds: Vec<Sample> = bands
        .iter_mut()
        .flat_map(|band| {
            band.sort_by(|a, b| b.log_value.total_cmp(&a.log_value));
            band.iter().take(3).copied().collect::<Vec<_>>()
        })
        .collect();
    let polished: Vec<Sample> = seeds
        .par_iter()
        .map(|s| polish(*s, &centers, r, thresholds.search_floor, &evaluate))
        .collect();
    for s in polished {
        let b = band_of(s.point.depth());
        if b <= max_level {
            bands[b as usize].push(s);
        }
    }

    let mut levels = Vec::with_capacity(max_level as usize);
    let mut best: Option<Sample> = None;
    let mut seen = 0;
    let mut max_log_modulus = f64::NEG_INFINITY;
    for level in 1..=max_level {
        seen += counts[level as usize];
        max_log_modulus = max_log_modulus.max(band_modulus[level as usize]);
        for s in &bands[level as usize] {
            if best.is_none_or(|b| s.log_value > b.log_value) {
                best = Some(*s);
            }
        }
        let (log_sup, argmax) = match best {
            Some(b) => (b.log_value, [b.point.value().re, b.point.value().im]),
            None => (f64::NEG_INFINITY, [f64::NAN, f64::NAN]),
        };
        levels.push(NormalityLevel {
            level,
            sup: log_sup.exp(),
            log_sup,
            argmax,
            samples: seen,
            max_log_modulus,
        });
    }

    let verdict = if evaluations == 0 || failures as f64 > thresholds.failure_fraction * evaluations as f64 {
        Trend::Inconclusive
    } else {
        classify(&levels, thresholds)
    };
    Ok(NormalityReport {
        function: f.label(),
        region: region.clone(),
        max_level,
        cover_level,
        levels,
        evaluations,
        failures,
        verdict,
        thresholds: *thresholds,
    })
}

fn classify(levels: &[NormalityLevel], th: &NormalityThresholds) -> Trend {
    let logs: Vec<f64> = levels.iter().map(|l| l.log_sup).collect();
    let n = logs.len();
    if n < 4 {
        return Trend::Inconclusive;
    }
    let last = &logs[n - 3..];
    let hi = last.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = last.iter().cloned().fold(f64::INFINITY, f64::min);
    // log scale: a factor comparison survives values beyond f64 range
    if lo == f64::NEG_INFINITY && hi == f64::NEG_INFINITY || hi - lo <= th.plateau.ln_1p() {
        return Trend::Bounded;
    }
    let tail = &logs[n - 4..];
    if tail.windows(2).all(|w| w[1] - w[0] >= th.growth.ln()) {
        return Trend::Diverging;
    }
    Trend::Inconclusive
}

/// Samples the circle `1 - |z| = 2^-level` inside the cover at hyperbolic
/// arc spacing 0.01 and refines the three best samples by ternary search.
fn edge_search(
    level: u32,
    centers: &[DiskPoint],
    r: f64,
    evaluate: &(impl Fn(DiskPoint) -> Option<f64> + Sync),
) -> (Vec<Sample>, usize, usize) {
    let depth = (-(level as f64)).exp2() * (1.0 + 1e-12);
    let rho = 1.0 - depth;
    let radius = crate::geometry::ph_to_h(r);
    let hits: Vec<usize> = (0..centers.len())
        .filter(|&i| {
            let c = centers[i];
            // hyperbolic distance from c to the circle |z| = rho, measured radially
            let s = |x: f64| ((1.0 + x) / (1.0 - x)).ln();
            (s(c.norm()) - s(rho)).abs() <= radius
        })
        .collect();
    if hits.is_empty() {
        return (Vec::new(), 0, 0);
    }
    let base = centers[hits[0]].value().arg();
    let wrap = |phi: f64| {
        let d = phi - base;
        d - std::f64::consts::TAU * (d / std::f64::consts::TAU).round()
    };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &i in &hits {
        let c = centers[i];
        let n = c.norm();
        let half = (r * (1.0 - n * n) / (1.0 - r * r * n * n) / rho).min(std::f64::consts::PI);
        let a = wrap(c.value().arg());
        lo = lo.min(a - half);
        hi = hi.max(a + half);
    }
    let step = 0.01 * (1.0 - rho * rho) / (2.0 * rho);
    let count = (((hi - lo) / step).ceil() as usize).clamp(2, 20_000);
    let feasible = |z: DiskPoint| {
        hits.iter()
            .map(|&i| (i, crate::geometry::pseudo_hyperbolic_distance(z, centers[i])))
            .filter(|(_, d)| *d <= r)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    };
    let at = |phi: f64| DiskPoint::from_polar(rho, base + phi).ok();
    let sample = |phi: f64| -> Option<Option<Sample>> {
        let z = at(phi)?;
        let ci = feasible(z)?;
        let local = MobiusAutomorphism::translation(centers[ci]).inverse().apply(z).value();
        Some(evaluate(z).map(|v| Sample {
            log_value: v,
            center: ci,
            local,
            point: z,
        }))
    };
    let mut evals = 0;
    let mut fails = 0;
    let mut found: Vec<(f64, Sample)> = Vec::new();
    for i in 0..=count {
        let phi = lo + (hi - lo) * i as f64 / count as f64;
        match sample(phi) {
            None => {}
            Some(None) => {
                evals += 1;
                fails += 1;
            }
            Some(Some(s)) => {
                evals += 1;
                found.push((phi, s));
            }
        }
    }
    let mut best = found.clone();
    best.sort_by(|a, b| b.1.log_value.total_cmp(&a.1.log_value));
    best.truncate(3);
    let score = |phi: f64| match sample(phi) {
        Some(Some(s)) => s.log_value,
        _ => f64::NEG_INFINITY,
    };
    let mut out: Vec<Sample> = found.into_iter().map(|(_, s)| s).collect();
    let dphi = (hi - lo) / count as f64;
    for (phi, _) in best {
        let (mut a, mut b) = (phi - dphi, phi + dphi);
        for _ in 0..120 {
            let m1 = a + (b - a) / 3.0;
            let m2 = b - (b - a) / 3.0;
            if score(m1) < score(m2) {
                a = m1;
            } else {
                b = m2;
            }
        }
        evals += 240;
        if let Some(Some(s)) = sample(0.5 * (a + b)) {
            out.push(s);
        }
    }
    (out, evals, fails)
}

/// Compass search on the log value within the pseudo-hyperbolic disk of
/// radius `r` about the seed's cover center.
fn polish(
    seed: Sample,
    centers: &[DiskPoint],
    r: f64,
    floor: f64,
    evaluate: &(impl Fn(DiskPoint) -> Option<f64> + Sync),
) -> Sample {
    let m = MobiusAutomorphism::translation(centers[seed.center]);
    let mut best = seed;
    let mut step = 0.05;
    let dirs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, -1.0),
    ];
    let mut iterations = 0;
    while step >= floor && iterations < 4000 {
        iterations += 1;
        let mut moved = false;
        for d in dirs {
            let u = best.local + d * step;
            if u.norm() > r {
                continue;
            }
            let Ok(local) = DiskPoint::new(u) else { continue };
            let z = m.apply(local);
            if let Some(v) = evaluate(z) {
                if v > best.log_value {
                    best = Sample {
                        log_value: v,
                        center: seed.center,
                        local: u,
                        point: z,
                    };
                    moved = true;
                    break;
                }
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{canonical_curve, CanonicalKind};
    use crate::functions::{example1_f0, gallery, Example1Schedule, GalleryName};
    use std::sync::Arc;

    fn radius_angle(r: f64) -> CurvilinearAngle {
        let c = Arc::new(canonical_curve(CanonicalKind::Radius, 0.0, 0.0).unwrap());
        CurvilinearAngle::new(c, r).unwrap()
    }

    #[test]
    fn identity_sup_is_one_at_the_origin() {
        let rep = normality_sup(&FunctionHandle::identity(), &radius_angle(0.5), 8, &Default::default()).unwrap();
        for l in &rep.levels {
            assert!((l.sup - 1.0).abs() <= 1e-9, "{l:?}");
        }
        assert_eq!(rep.verdict, Trend::Bounded);
        assert!(rep.levels.windows(2).all(|w| w[1].sup >= w[0].sup && w[1].samples >= w[0].samples));
    }

    #[test]
    fn automorphism_is_bounded_by_one() {
        let m = MobiusAutomorphism::translation(DiskPoint::from_parts(0.3, 0.0).unwrap());
        let rep = normality_sup(&FunctionHandle::mobius(m), &radius_angle(0.5), 8, &Default::default()).unwrap();
        let top = rep.levels.last().unwrap().sup;
        assert!(top <= 1.0 + 1e-9 && top > 0.99, "{top}");
        assert_eq!(rep.verdict, Trend::Bounded);
    }

    #[test]
    fn square_exp_diverges() {
        let rep = normality_sup(&gallery(GalleryName::SquareExp), &radius_angle(0.5), 12, &Default::default()).unwrap();
        assert_eq!(rep.verdict, Trend::Diverging, "{:?}", rep.levels);
    }

    #[test]
    fn example1_is_bounded_on_half_angle() {
        let s = Arc::new(Example1Schedule::default_schedule(0.0).unwrap());
        let f = example1_f0(s, 40).unwrap();
        let rep = normality_sup(&f, &radius_angle(0.5), 12, &Default::default()).unwrap();
        assert_eq!(rep.verdict, Trend::Bounded, "{:?}", rep.levels);
        assert_eq!(rep.failures, 0);
    }

    #[test]
    fn constants_are_flat() {
        let rep = normality_sup(&FunctionHandle::constant(Complex64::new(2.0, 1.0)), &radius_angle(0.3), 6, &Default::default()).unwrap();
        assert_eq!(rep.verdict, Trend::Bounded);
        assert!(rep.levels.iter().all(|l| l.sup == 0.0));
    }
}
