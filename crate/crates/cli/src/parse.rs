//! Compact command-line grammars: complex numbers, curves, functions and sequences.

use std::fs;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use boundary_lab::curves::{canonical_curve, BoundaryCurve, CanonicalKind};
use boundary_lab::functions::{example1_f0, example2_f1, Example1Schedule, FunctionHandle, FunctionSpec, GalleryName};
use boundary_lab::geometry::{DiskPoint, ExtendedComplex};
use num_complex::Complex64;

fn number(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| anyhow!("not a number: {s:?}"))?;
    if !v.is_finite() {
        bail!("not a finite number: {s:?}");
    }
    Ok(v)
}

/// `re,im` or a bare real.
pub fn complex(s: &str) -> Result<Complex64> {
    match s.split_once(',') {
        Some((re, im)) => Ok(Complex64::new(number(re)?, number(im)?)),
        None => Ok(Complex64::new(number(s)?, 0.0)),
    }
}

pub fn disk_point(s: &str) -> Result<DiskPoint> {
    Ok(DiskPoint::new(complex(s)?)?)
}

/// `re,im`, a bare real, or `inf`.
pub fn extended(s: &str) -> Result<ExtendedComplex> {
    if matches!(s.trim(), "inf" | "infinity") {
        return Ok(ExtendedComplex::Infinity);
    }
    Ok(ExtendedComplex::finite(complex(s)?))
}

/// `kind:theta[:param]` for the canonical curves, or `file:path.json` in the
/// exchange format.
pub fn curve(s: &str) -> Result<BoundaryCurve> {
    if let Some(path) = s.strip_prefix("file:") {
        let text = fs::read_to_string(path).with_context(|| format!("reading curve file {path}"))?;
        return Ok(BoundaryCurve::from_json(&text)?);
    }
    let parts: Vec<&str> = s.split(':').collect();
    let kind = match parts[0] {
        "radius" => CanonicalKind::Radius,
        "chord" => CanonicalKind::Chord,
        "hypercycle" => CanonicalKind::Hypercycle,
        "horocycle" => CanonicalKind::Horocycle,
        other => bail!("unknown curve kind {other:?}; expected radius, chord, hypercycle, horocycle or file"),
    };
    let theta = parts.get(1).map(|t| number(t)).transpose()?.unwrap_or(0.0);
    let param = match (kind, parts.get(2)) {
        (_, Some(p)) => number(p)?,
        (CanonicalKind::Chord | CanonicalKind::Hypercycle, None) => bail!("{} needs a parameter: {}:theta:param", parts[0], parts[0]),
        _ => 0.0,
    };
    if parts.len() > 3 {
        bail!("curve spec {s:?} has too many fields");
    }
    Ok(canonical_curve(kind, theta, param)?)
}

pub fn gallery_name(s: &str) -> Result<GalleryName> {
    GalleryName::ALL
        .into_iter()
        .find(|g| g.as_str() == s)
        .ok_or_else(|| anyhow!("unknown gallery function {s:?}"))
}

pub fn schedule(path: Option<&str>) -> Result<Arc<Example1Schedule>> {
    Ok(Arc::new(match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading schedule {p}"))?;
            Example1Schedule::from_json(&text)?
        }
        None => Example1Schedule::default_schedule(0.0)?,
    }))
}

/// A parsed function together with the spec recorded in reports.
pub struct Function {
    pub handle: FunctionHandle,
    pub spec: FunctionSpec,
}

/// `identity`, `zero`, `const:re,im`, `mobius:re,im[,phase]`, a gallery name,
/// `example1_f0[:K]` or `example2_f1[:K]` (first `K` poles of the schedule).
pub fn function(s: &str, schedule: &Arc<Example1Schedule>) -> Result<Function> {
    let (head, tail) = match s.split_once(':') {
        Some((h, t)) => (h, Some(t)),
        None => (s, None),
    };
    let truncation = |t: Option<&str>| -> Result<usize> {
        let k = match t {
            Some(k) => k.parse().map_err(|_| anyhow!("bad truncation {k:?}"))?,
            None => schedule.len(),
        };
        if k == 0 || k > schedule.len() {
            bail!("truncation must lie in 1..={}", schedule.len());
        }
        Ok(k)
    };
    let spec = match (head, tail) {
        ("identity", None) => FunctionSpec::Identity,
        ("zero", None) => FunctionSpec::Zero,
        ("const", Some(c)) => {
            let c = complex(c)?;
            FunctionSpec::Const { re: c.re, im: c.im }
        }
        ("mobius", Some(m)) => {
            let v: Vec<&str> = m.split(',').collect();
            if !(2..=3).contains(&v.len()) {
                bail!("mobius takes re,im[,phase]");
            }
            let phase = v.get(2).map(|p| number(p)).transpose()?.unwrap_or(0.0);
            FunctionSpec::Mobius {
                re: number(v[0])?,
                im: number(v[1])?,
                phase,
            }
        }
        ("example1_f0", t) => FunctionSpec::Example1F0 { truncation: truncation(t)? },
        ("example2_f1", t) => FunctionSpec::Example2F1 { truncation: truncation(t)? },
        (name, None) => FunctionSpec::Gallery { name: gallery_name(name)? },
        _ => bail!("unknown function {s:?}"),
    };
    let handle = match &spec {
        FunctionSpec::Example1F0 { truncation } => example1_f0(schedule.clone(), *truncation)?,
        FunctionSpec::Example2F1 { truncation } => example2_f1(schedule.clone(), *truncation)?,
        other => other.build()?,
    };
    Ok(Function { handle, spec })
}

/// `radial:N[:theta]` gives `(1 - 2^-n) e^{i theta}`; `poles:N` the first `N`
/// poles of the schedule; `pole-adjacent:N` the points `z_k + eps_k` on the
/// rim of each pole disk.
pub fn sequence(s: &str, schedule: &Example1Schedule) -> Result<Vec<DiskPoint>> {
    let parts: Vec<&str> = s.split(':').collect();
    let n: usize = parts
        .get(1)
        .ok_or_else(|| anyhow!("sequence {s:?} needs a length"))?
        .parse()
        .map_err(|_| anyhow!("bad sequence length in {s:?}"))?;
    if n == 0 {
        bail!("sequence length must be positive");
    }
    let poles = |n: usize| -> Result<()> {
        if n > schedule.len() {
            bail!("the schedule has only {} poles", schedule.len());
        }
        Ok(())
    };
    match parts[0] {
        "radial" => {
            let theta = parts.get(2).map(|t| number(t)).transpose()?.unwrap_or(0.0);
            if n > 48 {
                bail!("radial sequences are limited to 48 points");
            }
            (1..=n)
                .map(|k| Ok(DiskPoint::from_polar(1.0 - (-(k as f64)).exp2(), theta)?))
                .collect()
        }
        "poles" => {
            poles(n)?;
            Ok(schedule.poles[..n].to_vec())
        }
        "pole-adjacent" => {
            poles(n)?;
            let rotation = Complex64::from_polar(1.0, schedule.theta);
            (0..n)
                .map(|k| Ok(DiskPoint::new(schedule.poles[k].value() + schedule.radii[k] * rotation)?))
                .collect()
        }
        other => bail!("unknown sequence kind {other:?}; expected radial, poles or pole-adjacent"),
    }
}

/// `const:r` or `pole-diameters` (the hyperbolic diameter bounds of the pole disks).
pub fn radii(s: &str, n: usize, schedule: &Example1Schedule) -> Result<Vec<f64>> {
    if s == "pole-diameters" {
        if n > schedule.len() {
            bail!("the schedule has only {} poles", schedule.len());
        }
        return Ok((1..=n).map(|k| schedule.hyperbolic_diameter_bound(k)).collect());
    }
    match s.split_once(':') {
        Some(("const", r)) => {
            let r = number(r)?;
            if r <= 0.0 {
                bail!("radius must be positive");
            }
            Ok(vec![r; n])
        }
        _ => bail!("unknown radii {s:?}; expected const:r or pole-diameters"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(complex("-0.5,0").unwrap(), Complex64::new(-0.5, 0.0));
        assert_eq!(complex("0.25").unwrap(), Complex64::new(0.25, 0.0));
        assert!(complex("1,x").is_err());
        assert!(complex("nan,0").is_err());
        assert!(disk_point("1,0").is_err());
        assert_eq!(extended("inf").unwrap(), ExtendedComplex::Infinity);
    }

    #[test]
    fn curve_grammar() {
        assert_eq!(curve("radius:0").unwrap().spec(), canonical_curve(CanonicalKind::Radius, 0.0, 0.0).unwrap().spec());
        let chord = curve("chord:0:0.5").unwrap();
        assert_eq!(chord.spec(), canonical_curve(CanonicalKind::Chord, 0.0, 0.5).unwrap().spec());
        assert!(curve("chord:0").is_err());
        assert!(curve("spiral:0").is_err());
        assert!(curve("radius:0:1:2").is_err());
    }

    #[test]
    fn function_grammar() {
        let s = schedule(None).unwrap();
        assert_eq!(function("identity", &s).unwrap().spec, FunctionSpec::Identity);
        assert_eq!(
            function("mobius:0.5,0", &s).unwrap().spec,
            FunctionSpec::Mobius { re: 0.5, im: 0.0, phase: 0.0 }
        );
        assert_eq!(
            function("square_exp", &s).unwrap().spec,
            FunctionSpec::Gallery { name: GalleryName::SquareExp }
        );
        assert_eq!(function("example1_f0:5", &s).unwrap().spec, FunctionSpec::Example1F0 { truncation: 5 });
        assert!(function("example1_f0:0", &s).is_err());
        assert!(function("sin", &s).is_err());
    }

    #[test]
    fn sequences_and_radii() {
        let s = schedule(None).unwrap();
        let r = sequence("radial:3", &s).unwrap();
        assert_eq!(r[2].value(), Complex64::new(0.875, 0.0));
        assert_eq!(sequence("poles:4", &s).unwrap(), s.poles[..4].to_vec());
        let adj = sequence("pole-adjacent:2", &s).unwrap();
        assert!(((adj[1].value() - s.poles[1].value()).norm() - s.radii[1]).abs() < 1e-15);
        assert!(sequence("poles:999", &s).is_err());
        assert_eq!(radii("const:0.3", 2, &s).unwrap(), vec![0.3, 0.3]);
        assert_eq!(radii("pole-diameters", 2, &s).unwrap()[0], s.hyperbolic_diameter_bound(1));
        assert!(radii("wide", 2, &s).is_err());
    }
}
