//! Meromorphic functions on the disk and their spherical derivative.
//!
//! Functions report a [`Jet`]: value and first derivative in whichever of
//! three forms is numerically safe at the point. Near a pole the reciprocal
//! `1/f` is carried instead of `f`; exponential towers carry `log f`.

mod example1;
mod gallery;

pub use example1::{example1_f0, example1_tail_bound, example2_f1, Example1Schedule, ScheduleCheck};
pub use gallery::{gallery, GalleryName};

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DiskPoint, ExtendedComplex, MobiusAutomorphism};

/// Local first-order data of a meromorphic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Jet {
    /// `f(z)` and `f'(z)`.
    Finite { value: Complex64, deriv: Complex64 },
    /// `g = 1/f` and `g'`, used near poles; `g = 0` at a pole.
    Reciprocal { value: Complex64, deriv: Complex64 },
    /// `L = log f` and `L' = f'/f`.
    Log { log_value: Complex64, log_deriv: Complex64 },
    /// `|log |f||` exceeds double range: `f` is 0 (`to_zero`) or infinity to
    /// working precision and the spherical derivative vanishes.
    Saturated { to_zero: bool },
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

impl Jet {
    fn check(self, z: DiskPoint) -> Result<Self> {
        let ok = match self {
            Jet::Finite { value, deriv } | Jet::Reciprocal { value, deriv } => is_finite(value) && is_finite(deriv),
            Jet::Log { log_value, log_deriv } => !log_value.re.is_nan() && is_finite(log_deriv),
            Jet::Saturated { .. } => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::EvaluationOverflow {
                re: z.value().re,
                im: z.value().im,
            })
        }
    }

    /// The jet of `1/f`.
    pub fn reciprocal(self) -> Self {
        match self {
            Jet::Finite { value, deriv } => Jet::Reciprocal { value, deriv },
            Jet::Reciprocal { value, deriv } => Jet::Finite { value, deriv },
            Jet::Log { log_value, log_deriv } => Jet::Log {
                log_value: -log_value,
                log_deriv: -log_deriv,
            },
            Jet::Saturated { to_zero } => Jet::Saturated { to_zero: !to_zero },
        }
    }

    /// `f(z)` on the sphere; exponentials beyond double range saturate.
    pub fn value(self) -> ExtendedComplex {
        match self {
            Jet::Finite { value, .. } => ExtendedComplex::from_complex(value),
            Jet::Reciprocal { value, .. } => {
                if value == Complex64::new(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex(value.inv())
                }
            }
            Jet::Log { log_value, .. } => {
                if log_value.re > 709.0 {
                    ExtendedComplex::Infinity
                } else if log_value.re < -745.0 {
                    ExtendedComplex::ZERO
                } else {
                    ExtendedComplex::from_complex(log_value.exp())
                }
            }
            Jet::Saturated { to_zero } => {
                if to_zero {
                    ExtendedComplex::ZERO
                } else {
                    ExtendedComplex::Infinity
                }
            }
        }
    }

    /// True when [`Jet::value`] had to clamp to 0 or infinity.
    pub fn saturated(self) -> bool {
        match self {
            Jet::Log { log_value, .. } => log_value.re > 709.0 || log_value.re < -745.0,
            Jet::Saturated { .. } => true,
            _ => false,
        }
    }

    pub fn deriv(self) -> ExtendedComplex {
        match self {
            Jet::Finite { deriv, .. } => ExtendedComplex::from_complex(deriv),
            Jet::Reciprocal { value, deriv } => {
                if value == Complex64::new(0.0, 0.0) {
                    ExtendedComplex::Infinity
                } else {
                    ExtendedComplex::from_complex(-deriv / (value * value))
                }
            }
            Jet::Log { log_value, log_deriv } => {
                if log_value.re < -745.0 {
                    ExtendedComplex::ZERO
                } else {
                    ExtendedComplex::from_complex(log_deriv * log_value.exp())
                }
            }
            Jet::Saturated { to_zero } => {
                if to_zero {
                    ExtendedComplex::ZERO
                } else {
                    ExtendedComplex::Infinity
                }
            }
        }
    }

    /// `log |f(z)|`, possibly infinite.
    pub fn log_modulus(self) -> f64 {
        match self {
            Jet::Finite { value, .. } => value.norm().ln(),
            Jet::Reciprocal { value, .. } => -value.norm().ln(),
            Jet::Log { log_value, .. } => log_value.re,
            Jet::Saturated { to_zero } => {
                if to_zero {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// `log f#(z)`; `-inf` where the spherical derivative vanishes.
    pub fn log_spherical_derivative(self) -> f64 {
        match self {
            Jet::Finite { value, deriv } | Jet::Reciprocal { value, deriv } => {
                // invariant under f -> 1/f; evaluate on whichever of f, 1/f is small
                let m = value.norm();
                let d = deriv.norm();
                if d == 0.0 {
                    return f64::NEG_INFINITY;
                }
                if m <= 1.0 {
                    d.ln() - (m * m).ln_1p()
                } else {
                    d.ln() - 2.0 * m.ln() - (1.0 / (m * m)).ln_1p()
                }
            }
            Jet::Log { log_value, log_deriv } => {
                // f# = |L'| / (2 cosh Re L)
                let d = log_deriv.norm();
                if d == 0.0 {
                    return f64::NEG_INFINITY;
                }
                let a = log_value.re.abs();
                d.ln() - a - (-2.0 * a).exp().ln_1p()
            }
            Jet::Saturated { .. } => f64::NEG_INFINITY,
        }
    }
}

/// An evaluatable meromorphic function on the disk.
pub trait Meromorphic: Send + Sync {
    fn jet(&self, z: DiskPoint) -> Result<Jet>;
    fn label(&self) -> String;
}

/// Shared handle to a [`Meromorphic`] function.
#[derive(Clone)]
pub struct FunctionHandle {
    inner: Arc<dyn Meromorphic>,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle").field("label", &self.label()).finish()
    }
}

impl FunctionHandle {
    pub fn new<M: Meromorphic + 'static>(m: M) -> Self {
        Self { inner: Arc::new(m) }
    }

    pub fn label(&self) -> String {
        self.inner.label()
    }

    pub fn jet(&self, z: DiskPoint) -> Result<Jet> {
        self.inner.jet(z)?.check(z)
    }

    pub fn eval(&self, z: DiskPoint) -> Result<ExtendedComplex> {
        Ok(self.jet(z)?.value())
    }

    pub fn deriv(&self, z: DiskPoint) -> Result<ExtendedComplex> {
        Ok(self.jet(z)?.deriv())
    }

    pub fn log_modulus(&self, z: DiskPoint) -> Result<f64> {
        Ok(self.jet(z)?.log_modulus())
    }

    pub fn reciprocal(&self) -> Self {
        Self::new(Reciprocal(self.clone()))
    }

    pub fn identity() -> Self {
        Self::from_jet("identity", |z| Jet::Finite {
            value: z,
            deriv: Complex64::new(1.0, 0.0),
        })
    }

    pub fn zero() -> Self {
        Self::from_jet("zero", |_| Jet::Finite {
            value: Complex64::new(0.0, 0.0),
            deriv: Complex64::new(0.0, 0.0),
        })
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_jet(&format!("const:{},{}", c.re, c.im), move |_| Jet::Finite {
            value: c,
            deriv: Complex64::new(0.0, 0.0),
        })
    }

    pub fn mobius(m: MobiusAutomorphism) -> Self {
        let w = m.center.value();
        Self::from_jet(&format!("mobius:{},{}:{}", w.re, w.im, m.phase), move |z| Jet::Finite {
            value: m.apply_complex(z),
            deriv: m.derivative(z),
        })
    }

    /// Wraps a closed-form jet.
    pub fn from_jet(label: &str, f: impl Fn(Complex64) -> Jet + Send + Sync + 'static) -> Self {
        Self::new(ClosedForm {
            label: label.to_string(),
            f: Box::new(f),
        })
    }

    /// Wraps a holomorphic value function; the derivative is a central
    /// difference with step `1e-6 (1 - |z|)`.
    pub fn from_fn(label: &str, f: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self::new(Differenced {
            label: label.to_string(),
            f: Box::new(f),
        })
    }

    /// `f#(z) = |f'(z)| / (1 + |f(z)|^2)`.
    pub fn spherical_derivative(&self, z: DiskPoint) -> Result<f64> {
        spherical_derivative(self, z)
    }

    pub fn lehto_virtanen_value(&self, z: DiskPoint) -> Result<f64> {
        lehto_virtanen_value(self, z)
    }
}

pub fn spherical_derivative(f: &FunctionHandle, z: DiskPoint) -> Result<f64> {
    Ok(f.jet(z)?.log_spherical_derivative().exp())
}

/// `(1 - |z|^2) f#(z)`.
pub fn lehto_virtanen_value(f: &FunctionHandle, z: DiskPoint) -> Result<f64> {
    Ok(log_lehto_virtanen_value(f, z)?.exp())
}

/// `log((1 - |z|^2) f#(z))`, finite well beyond the range of the value itself.
pub fn log_lehto_virtanen_value(f: &FunctionHandle, z: DiskPoint) -> Result<f64> {
    Ok(z.conformal_weight().ln() + f.jet(z)?.log_spherical_derivative())
}

struct ClosedForm {
    label: String,
    f: Box<dyn Fn(Complex64) -> Jet + Send + Sync>,
}

impl Meromorphic for ClosedForm {
    fn jet(&self, z: DiskPoint) -> Result<Jet> {
        Ok((self.f)(z.value()))
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

struct Differenced {
    label: String,
    f: Box<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

impl Meromorphic for Differenced {
    fn jet(&self, z: DiskPoint) -> Result<Jet> {
        let step = 1e-6 * z.depth();
        let h = Complex64::new(step, 0.0);
        let zv = z.value();
        let deriv = ((self.f)(zv + h) - (self.f)(zv - h)) / (2.0 * step);
        Ok(Jet::Finite {
            value: (self.f)(zv),
            deriv,
        })
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}

struct Reciprocal(FunctionHandle);

impl Meromorphic for Reciprocal {
    fn jet(&self, z: DiskPoint) -> Result<Jet> {
        Ok(self.0.jet(z)?.reciprocal())
    }

    fn label(&self) -> String {
        format!("1/({})", self.0.label())
    }
}

/// Spec of a named function, used by the CLI and reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    Identity,
    Zero,
    Const { re: f64, im: f64 },
    Mobius { re: f64, im: f64, phase: f64 },
    Gallery { name: GalleryName },
    Example1F0 { truncation: usize },
    Example2F1 { truncation: usize },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<FunctionHandle> {
        Ok(match self {
            FunctionSpec::Identity => FunctionHandle::identity(),
            FunctionSpec::Zero => FunctionHandle::zero(),
            FunctionSpec::Const { re, im } => FunctionHandle::constant(Complex64::new(*re, *im)),
            FunctionSpec::Mobius { re, im, phase } => {
                FunctionHandle::mobius(MobiusAutomorphism::new(DiskPoint::from_parts(*re, *im)?, *phase))
            }
            FunctionSpec::Gallery { name } => gallery(*name),
            FunctionSpec::Example1F0 { truncation } => {
                example1_f0(Arc::new(Example1Schedule::default_schedule(0.0)?), *truncation)?
            }
            FunctionSpec::Example2F1 { truncation } => {
                example2_f1(Arc::new(Example1Schedule::default_schedule(0.0)?), *truncation)?
            }
        })
    }
}
