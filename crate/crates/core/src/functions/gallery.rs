//! Closed-form probes built from exponentials of `u = 1/(1 - z)`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FunctionHandle, Jet};
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GalleryName {
    /// `exp(-exp(1/(1 - z)))`.
    GavrilovG,
    /// `exp(-1/(1 - z))`.
    SaginjanH,
    /// `exp(-(1 - z)^{-2})`.
    SquareExp,
}

impl GalleryName {
    pub const ALL: [GalleryName; 3] = [GalleryName::GavrilovG, GalleryName::SaginjanH, GalleryName::SquareExp];

    pub fn as_str(self) -> &'static str {
        match self {
            GalleryName::GavrilovG => "gavrilov_g",
            GalleryName::SaginjanH => "saginjan_h",
            GalleryName::SquareExp => "square_exp",
        }
    }
}

impl fmt::Display for GalleryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GalleryName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        GalleryName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown gallery function {s:?}")))
    }
}

/// Log-derivatives above this size are only meaningful when `f#` underflows anyway.
const SATURATION: f64 = 2000.0;

fn log_jet(log_value: Complex64, log_deriv: Complex64) -> Jet {
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
    if (!finite(log_value) || !finite(log_deriv)) && log_value.re.abs() > SATURATION {
        return Jet::Saturated {
            to_zero: log_value.re < 0.0,
        };
    }
    Jet::Log { log_value, log_deriv }
}

fn u_of(z: Complex64) -> Complex64 {
    (Complex64::new(1.0, 0.0) - z).inv()
}

pub fn gallery(name: GalleryName) -> FunctionHandle {
    match name {
        GalleryName::GavrilovG => FunctionHandle::from_jet(name.as_str(), |z| {
            let u = u_of(z);
            if u.re <= 700.0 {
                let l = -u.exp();
                return log_jet(l, l * u * u);
            }
            // Re L = -e^{Re u} cos(Im u) is beyond double range unless cos(Im u) ~ 0
            let c = u.im.cos();
            let log_abs_re = u.re + c.abs().ln();
            if log_abs_re > 700.0 {
                Jet::Saturated { to_zero: c > 0.0 }
            } else {
                Jet::Log {
                    log_value: Complex64::new(f64::NAN, 0.0),
                    log_deriv: Complex64::new(f64::INFINITY, 0.0),
                }
            }
        }),
        GalleryName::SaginjanH => FunctionHandle::from_jet(name.as_str(), |z| {
            let u = u_of(z);
            log_jet(-u, -u * u)
        }),
        GalleryName::SquareExp => FunctionHandle::from_jet(name.as_str(), |z| {
            let u = u_of(z);
            let u2 = u * u;
            log_jet(-u2, -2.0 * u2 * u)
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_euclidean_disk, DiskPoint};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn log_value(f: &FunctionHandle, z: Complex64) -> Option<Complex64> {
        match f.jet(DiskPoint::new(z).ok()?).ok()? {
            Jet::Log { log_value, .. } => Some(log_value),
            _ => None,
        }
    }

    #[test]
    fn radial_identities() {
        let h = gallery(GalleryName::SaginjanH);
        let g = gallery(GalleryName::GavrilovG);
        let s = gallery(GalleryName::SquareExp);
        for r in [0.0, 0.3, 0.9, 0.999, 1.0 - 1e-9] {
            let z = DiskPoint::from_parts(r, 0.0).unwrap();
            let t = 1.0 - r;
            assert!((-h.log_modulus(z).unwrap() * t - 1.0).abs() <= 1e-9);
            assert!((-s.log_modulus(z).unwrap() * t * t - 1.0).abs() <= 1e-9);
            if 1.0 / t < 700.0 {
                let lg = -g.log_modulus(z).unwrap();
                assert!((lg / (1.0 / t).exp() - 1.0).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn log_derivatives_match_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for name in GalleryName::ALL {
            let f = gallery(name);
            let mut checked = 0;
            while checked < 1000 {
                let z = sample_euclidean_disk(&mut rng, Complex64::new(0.0, 0.0), 1.0 - 1e-3);
                let zp = DiskPoint::new(z).unwrap();
                let Ok(Jet::Log { log_deriv, .. }) = f.jet(zp) else { continue };
                let step = 1e-6 * zp.depth();
                let (Some(a), Some(b)) = (log_value(&f, z + step), log_value(&f, z - step)) else { continue };
                let fd = (a - b) / (2.0 * step);
                assert!((fd - log_deriv).norm() <= 1e-4 * log_deriv.norm(), "{name} at {z}");
                checked += 1;
            }
        }
    }

    #[test]
    fn gavrilov_saturates_near_one() {
        let g = gallery(GalleryName::GavrilovG);
        let z = DiskPoint::from_parts(1.0 - 1e-4, 0.0).unwrap();
        let jet = g.jet(z).unwrap();
        assert_eq!(jet, Jet::Saturated { to_zero: true });
        assert_eq!(g.lehto_virtanen_value(z).unwrap(), 0.0);
    }

    #[test]
    fn names_parse() {
        for n in GalleryName::ALL {
            assert_eq!(n.as_str().parse::<GalleryName>().unwrap(), n);
        }
        assert!("nope".parse::<GalleryName>().is_err());
    }
}
