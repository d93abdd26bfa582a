//! Logarithmic Mahler measure with certified root inclusion disks.

use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use super::poly::IntPolynomial;
use crate::error::{Error, Result};
use crate::exact::loglinear::ln_f64;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Bracket `[lower, upper]` for `log M(f)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MahlerEstimate {
    pub lower: f64,
    pub upper: f64,
}

impl MahlerEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, f64) {
    // value and the running sum of |a_k||z|^k used for the rounding bound
    let mut v = Complex64::zero();
    let mut m = 0.0;
    let az = z.norm();
    for &a in c.iter().rev() {
        v = v * z + a;
        m = m * az + a.abs();
    }
    (v, m)
}

fn horner_d(c: &[f64], z: Complex64) -> Complex64 {
    let n = c.len() - 1;
    let mut v = Complex64::zero();
    for k in (1..=n).rev() {
        v = v * z + c[k] * k as f64;
    }
    v
}

/// Simultaneous Aberth–Ehrlich iteration.
fn aberth(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let lead = c[n].abs();
    let cauchy = 1.0 + c[..n].iter().map(|a| a.abs() / lead).fold(0.0, f64::max);
    let r0 = (c[0].abs() / lead).powf(1.0 / n as f64).clamp(1e-3, cauchy);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut quiet = 0;
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, _) = horner(c, z[i]);
            let dp = horner_d(c, z[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-16 {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    z
}

/// Inclusion radii: disk `i` is centred at `z[i]`; if the disks are pairwise
/// disjoint each holds exactly one root.
fn inclusion_radii(c: &[f64], z: &[Complex64]) -> Vec<f64> {
    let n = z.len();
    let eps = f64::EPSILON;
    let gamma = 2.0 * n as f64 * eps / (1.0 - 2.0 * n as f64 * eps);
    (0..n)
        .map(|i| {
            let (v, m) = horner(c, z[i]);
            let num = v.norm() + gamma * m * 1.5;
            let den: f64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).norm()).product::<f64>()
                * c[n].abs()
                * (1.0 - 4.0 * n as f64 * eps);
            n as f64 * num / den * (1.0 + 1e-10)
        })
        .collect()
}

fn squarefree_bracket(g: &IntPolynomial) -> Result<(f64, f64)> {
    let n = g.degree();
    let lead = ln_f64(g.leading().magnitude());
    if n == 0 {
        let slack = 4.0 * f64::EPSILON * lead.abs().max(1.0);
        return Ok((lead - slack, lead + slack));
    }
    let c = g
        .to_f64()
        .ok_or_else(|| Error::NotCertified("coefficients exceed floating range".into()))?;
    if n == 1 {
        // root -c0/c1 exactly: log max(|c1|, |c0|)
        let m = g.coeffs()[0].magnitude().max(g.coeffs()[1].magnitude()).clone();
        let v = ln_f64(&m);
        let slack = 4.0 * f64::EPSILON * v.abs().max(1.0);
        return Ok((v - slack, v + slack));
    }
    let z = aberth(&c);
    let r = inclusion_radii(&c, &z);
    for i in 0..n {
        if !r[i].is_finite() {
            return Err(Error::NotCertified(format!("root {i} did not converge")));
        }
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= r[i] + r[j] {
                return Err(Error::NotCertified("inclusion disks overlap".into()));
            }
        }
    }
    let mut lo = lead;
    let mut hi = lead;
    for i in 0..n {
        let a = z[i].norm();
        lo += (a - r[i]).max(1.0).ln();
        hi += (a + r[i]).max(1.0).ln();
    }
    let slack = 4.0 * (n as f64 + 1.0) * f64::EPSILON * hi.abs().max(1.0);
    Ok((lo - slack, hi + slack))
}

/// Brackets `log M(f) = log |lead(f)| + Σ log max(1, |root|)`.
pub fn mahler_measure(f: &IntPolynomial, tol: f64) -> Result<MahlerEstimate> {
    if f.is_zero() {
        return Err(Error::InvalidInput("Mahler measure of the zero polynomial".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let content = f.content();
    let base = ln_f64(content.magnitude());
    let slack = 4.0 * f64::EPSILON * base.abs().max(1.0);
    let (mut lo, mut hi) = (base - slack, base + slack);
    for (g, m) in f.squarefree_decomposition() {
        let (a, b) = squarefree_bracket(&g)?;
        lo += a * m as f64;
        hi += b * m as f64;
    }
    let est = MahlerEstimate { lower: lo, upper: hi };
    if est.width() > tol {
        return Err(Error::NotCertified(format!(
            "bracket width {:.3e} exceeds tolerance {tol:.3e}",
            est.width()
        )));
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(c: &[i64]) -> MahlerEstimate {
        mahler_measure(&IntPolynomial::from_i64(c), DEFAULT_TOL).unwrap()
    }

    #[test]
    fn reference_values() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(m(&[-1, -1, 1]).contains(golden.ln()));
        assert!(m(&[-2, 1]).contains(2f64.ln()));
        let lehmer = m(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        assert!((lehmer.midpoint() - 0.162357612007738).abs() < 1e-9);
    }

    #[test]
    fn repeated_factors() {
        // (x - 2)^2 (x^2 - x - 1)
        let f = IntPolynomial::from_i64(&[-2, 1])
            .mul(&IntPolynomial::from_i64(&[-2, 1]))
            .mul(&IntPolynomial::from_i64(&[-1, -1, 1]));
        let e = mahler_measure(&f, 1e-9).unwrap();
        let want = 2.0 * 2f64.ln() + ((1.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(e.contains(want) || (e.midpoint() - want).abs() < 1e-12);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            mahler_measure(&IntPolynomial::new(vec![]), 1e-9),
            Err(Error::InvalidInput(_))
        ));
    }
}
