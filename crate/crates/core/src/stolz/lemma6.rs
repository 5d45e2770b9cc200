use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{rho_of_alpha, StolzMap};
use crate::error::{Error, Result};
use crate::report::{num, Table, Tabular};

/// Sampled distortion constants of the Stolz map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Report {
    pub alpha: f64,
    pub beta: f64,
    pub samples: usize,
    /// Smallest ratio `(1 - |w|) / (1 - |z|)^{pi/(2 alpha)}` on the fitting set.
    pub m_hat: f64,
    /// Largest ratio on the fitting set.
    pub big_m_hat: f64,
    pub holdout_min: f64,
    pub holdout_max: f64,
    pub pass: bool,
}

impl Tabular for Lemma6Report {
    fn table(&self) -> Table {
        let mut t = Table::new(&["set", "min_ratio", "max_ratio", "alpha", "beta", "samples"]);
        t.push(["fit".into(), num(self.m_hat), num(self.big_m_hat), num(self.alpha), num(self.beta), self.samples.to_string()]);
        t.push([
            "holdout".into(),
            num(self.holdout_min),
            num(self.holdout_max),
            num(self.alpha),
            num(self.beta),
            self.samples.to_string(),
        ]);
        t
    }
}

/// `1 - |1 - t e^{i psi}|` without cancellation.
fn depth_of(t: f64, psi: f64) -> f64 {
    let w = Complex64::new(1.0, 0.0) - Complex64::from_polar(t, psi);
    (2.0 * t * psi.cos() - t * t) / (1.0 + w.norm())
}

fn ratios<R: Rng + ?Sized>(map: &StolzMap, beta: f64, rho_beta: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let p = map.exponent();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        // log-uniform distance to the vertex, uniform direction
        let t = rho_beta * (rng.gen::<f64>() * 1e-6f64.ln()).exp();
        let psi = rng.gen_range(-beta..beta);
        let w = Complex64::new(1.0, 0.0) - Complex64::from_polar(t, psi);
        if !(w.norm() < 1.0) {
            continue;
        }
        let v = map.vertex_offset(Complex64::from_polar(t, psi))?;
        let depth_z = (2.0 * v.re - v.norm_sqr()) / (1.0 + (Complex64::new(1.0, 0.0) - v).norm());
        if depth_z <= 0.0 {
            continue;
        }
        out.push(depth_of(t, psi) / depth_z.powf(p));
    }
    Ok(out)
}

/// Estimates the two-sided bound `m (1-|z|)^{pi/2a} <= 1-|w| <= M (1-|z|)^{pi/2a}`
/// for `w` in `A(1, beta, rho(beta))` and `z` its preimage under the map of
/// `A(1, alpha, rho(alpha))`, then checks a fresh sample against `[m/2, 2M]`.
pub fn lemma6_check<R: Rng + ?Sized>(alpha: f64, beta: f64, samples: usize, rng: &mut R) -> Result<Lemma6Report> {
    let map = StolzMap::new(0.0, alpha)?;
    let rho_beta = rho_of_alpha(beta)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("lemma6_check needs samples".into()));
    }
    let fit = ratios(&map, beta, rho_beta, samples, rng)?;
    let hold = ratios(&map, beta, rho_beta, samples, rng)?;
    let min = |v: &[f64]| v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (m_hat, big_m_hat) = (min(&fit), max(&fit));
    let (holdout_min, holdout_max) = (min(&hold), max(&hold));
    let pass = m_hat > 0.0
        && big_m_hat.is_finite()
        && holdout_min >= 0.5 * m_hat
        && holdout_max <= 2.0 * big_m_hat;
    Ok(Lemma6Report {
        alpha,
        beta,
        samples,
        m_hat,
        big_m_hat,
        holdout_min,
        holdout_max,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn quarter_angles_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let r = lemma6_check(FRAC_PI_4, FRAC_PI_4, 10_000, &mut rng).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.m_hat > 0.0 && r.big_m_hat < 100.0);
    }

    #[test]
    fn grid_of_angles_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for alpha in [FRAC_PI_4, FRAC_PI_3] {
            for beta in [FRAC_PI_6, FRAC_PI_4] {
                assert!(lemma6_check(alpha, beta, 5000, &mut rng).unwrap().pass);
            }
        }
    }

    #[test]
    fn beta_approaching_alpha_keeps_finite_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut last_m = f64::INFINITY;
        for beta in [0.5, 0.7, 0.75, 0.78] {
            let r = lemma6_check(FRAC_PI_4, beta, 4000, &mut rng).unwrap();
            assert!(r.pass && r.m_hat > 0.0 && r.big_m_hat.is_finite(), "{r:?}");
            assert!(r.m_hat <= last_m * 1.5);
            last_m = r.m_hat;
        }
    }

    #[test]
    fn vertex_depth_is_exact() {
        // 1 - |1 - t| = t on the axis
        assert!((depth_of(1e-9, 0.0) - 1e-9).abs() < 1e-24);
    }
}
