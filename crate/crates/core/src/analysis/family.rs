use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::FunctionHandle;
use crate::geometry::{spherical_distance, DiskPoint, ExtendedComplex, MobiusAutomorphism};
use crate::report::{num, Table, Tabular};

/// Spacing of the square grid on `|z| <= r1`.
pub const FAMILY_MESH: f64 = 0.02;
const CONVERGED: f64 = 1e-3;
const FAILURE_FRACTION: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyVerdict {
    Converges,
    NotConverged,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub function: String,
    pub w_sequence: Vec<[f64; 2]>,
    pub r1: f64,
    pub target: ExtendedComplex,
    /// `sup_{|z| <= r1} d_S(f(phi_{w_n}(z)), c)` per `n`.
    pub sup_ds: Vec<f64>,
    /// `f(w_N)`, the value the family approaches if it converges.
    pub limit_candidate: Option<ExtendedComplex>,
    pub grid_points: usize,
    pub failures: usize,
    pub verdict: FamilyVerdict,
    pub mesh: f64,
    pub threshold: f64,
}

impl Tabular for FamilyReport {
    fn table(&self) -> Table {
        let mut t = Table::new(&["n", "w_re", "w_im", "sup_ds"]);
        for (i, (w, s)) in self.w_sequence.iter().zip(&self.sup_ds).enumerate() {
            t.push([(i + 1).to_string(), num(w[0]), num(w[1]), num(*s)]);
        }
        t
    }
}

fn grid(r1: f64) -> Vec<DiskPoint> {
    let n = (r1 / FAMILY_MESH).floor() as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            let (x, y) = (i as f64 * FAMILY_MESH, j as f64 * FAMILY_MESH);
            if x * x + y * y <= r1 * r1 {
                out.push(DiskPoint::from_parts(x, y).expect("grid inside the disk"));
            }
        }
    }
    out
}

/// Uniform spherical distance of `f ∘ phi_{w_n}` from the constant `c` on `|z| <= r1`.
pub fn renormalized_family_check(
    f: &FunctionHandle,
    w_sequence: &[DiskPoint],
    r1: f64,
    c: ExtendedComplex,
) -> Result<FamilyReport> {
    if !(r1 > 0.0 && r1 < 1.0) {
        return Err(Error::OutOfRange { value: r1, range: "(0, 1)" });
    }
    if w_sequence.is_empty() {
        return Err(Error::InvalidParameter("empty w sequence".into()));
    }
    let points = grid(r1);
    let per: Vec<(f64, usize)> = w_sequence
        .par_iter()
        .map(|&w| {
            let m = MobiusAutomorphism::translation(w);
            let mut sup: f64 = 0.0;
            let mut fails = 0;
            for z in &points {
                match f.eval(m.apply(*z)) {
                    Ok(v) => sup = sup.max(spherical_distance(v, c)),
                    Err(_) => fails += 1,
                }
            }
            (sup, fails)
        })
        .collect();
    let sup_ds: Vec<f64> = per.iter().map(|p| p.0).collect();
    let failures: usize = per.iter().map(|p| p.1).sum();
    let total = points.len() * w_sequence.len();
    let verdict = if failures as f64 > FAILURE_FRACTION * total as f64 {
        FamilyVerdict::Inconclusive
    } else if *sup_ds.last().unwrap() < CONVERGED {
        FamilyVerdict::Converges
    } else {
        FamilyVerdict::NotConverged
    };
    Ok(FamilyReport {
        function: f.label(),
        w_sequence: w_sequence.iter().map(|w| [w.value().re, w.value().im]).collect(),
        r1,
        target: c,
        sup_ds,
        limit_candidate: f.eval(*w_sequence.last().unwrap()).ok(),
        grid_points: points.len(),
        failures,
        verdict,
        mesh: FAMILY_MESH,
        threshold: CONVERGED,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{example2_f1, Example1Schedule};
    use num_complex::Complex64;
    use std::sync::Arc;

    fn radial(n: usize) -> Vec<DiskPoint> {
        (1..=n).map(|k| DiskPoint::from_parts(1.0 - (-(k as f64)).exp2(), 0.0).unwrap()).collect()
    }

    #[test]
    fn constant_family_is_exact() {
        let c = Complex64::new(0.3, -2.0);
        let rep = renormalized_family_check(&FunctionHandle::constant(c), &radial(5), 0.5, ExtendedComplex::finite(c)).unwrap();
        assert!(rep.sup_ds.iter().all(|v| *v == 0.0));
        assert_eq!(rep.verdict, FamilyVerdict::Converges);
    }

    #[test]
    fn identity_family_tends_to_one() {
        let one = ExtendedComplex::finite(Complex64::new(1.0, 0.0));
        let rep = renormalized_family_check(&FunctionHandle::identity(), &radial(20), 0.9, one).unwrap();
        assert!(rep.sup_ds.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(rep.verdict, FamilyVerdict::Converges);
        // phi_w(-0.9) = (w - 0.9)/(1 - 0.9 w): chordal gap about 19 (1 - w)
        let eps = (-20.0f64).exp2();
        assert!((rep.sup_ds[19] / (19.0 * eps) - 1.0).abs() < 0.01);
    }

    #[test]
    fn example2_family_tends_to_zero() {
        let s = Arc::new(Example1Schedule::default_schedule(0.0).unwrap());
        let rep = renormalized_family_check(&example2_f1(s, 40).unwrap(), &radial(20), 0.5, ExtendedComplex::ZERO).unwrap();
        assert_eq!(rep.verdict, FamilyVerdict::Converges, "{:?}", rep.sup_ds);
    }

    #[test]
    fn wrong_target_does_not_converge() {
        let rep = renormalized_family_check(&FunctionHandle::identity(), &radial(12), 0.5, ExtendedComplex::ZERO).unwrap();
        assert_eq!(rep.verdict, FamilyVerdict::NotConverged);
    }
}
