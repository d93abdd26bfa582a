//! Complete lists of algebraic numbers of bounded degree and height.
//!
//! An algebraic number of degree `k` and height `< B` has a primitive
//! minimal polynomial with Mahler measure `M < e^(kB)`, so its coefficients
//! satisfy `|a_i| <= C(k, i) M`. The box is searched exhaustively; each
//! irreducible candidate is kept when its certified height bracket lies
//! below `B`.

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebraic::{mahler_measure, IntPolynomial, MahlerEstimate};
use crate::error::{Error, Result};

pub const MAX_ENUM_DEGREE: usize = 4;
pub const MAX_ENUM_BOUND: f64 = 1.0;
/// Largest coefficient box searched.
pub const MAX_ENUM_CANDIDATES: u64 = 20_000_000;

const MAHLER_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnumeratedPoly {
    pub polynomial: IntPolynomial,
    pub display: String,
    pub degree: usize,
    /// Number of algebraic numbers with this minimal polynomial.
    pub roots: usize,
    pub log_mahler: MahlerEstimate,
    pub height_lower: f64,
    pub height_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Enumeration {
    pub max_degree: usize,
    pub bound: f64,
    pub polynomials: Vec<EnumeratedPoly>,
    /// Total number of algebraic numbers found.
    pub count: usize,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

fn coefficient_box(k: usize, bound: f64) -> Vec<i64> {
    let e = (k as f64 * bound).exp() * (1.0 + 1e-12);
    (0..=k).map(|i| (binom(k, i) * e).floor() as i64).collect()
}

fn divisors(n: i64) -> Vec<i64> {
    let n = n.abs();
    (1..=n).filter(|d| n % d == 0).collect()
}

fn has_rational_root(c: &[i64]) -> bool {
    let k = c.len() - 1;
    if c[0] == 0 {
        return true;
    }
    for p in divisors(c[0]) {
        for q in divisors(c[k]) {
            if p.gcd(&q) != 1 {
                continue;
            }
            for sp in [p, -p] {
                // q^k f(sp/q)
                let v: i128 = (0..=k)
                    .map(|i| {
                        c[i] as i128 * (sp as i128).pow(i as u32) * (q as i128).pow((k - i) as u32)
                    })
                    .sum();
                if v == 0 {
                    return true;
                }
            }
        }
    }
    false
}

fn isqrt_exact(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = (n as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).find(|x| x * x == n)
}

/// `c_4 x^4 + ... + c_0 = (b2 x^2 + b1 x + b0)(e2 x^2 + e1 x + e0)` over Z.
fn has_quadratic_factor(c: &[i64]) -> bool {
    let [a0, a1, a2, a3, a4] = [c[0], c[1], c[2], c[3], c[4]].map(|x| x as i128);
    for b2 in divisors(c[4]).into_iter().map(|x| x as i128) {
        let e2 = a4 / b2;
        for b0 in divisors(c[0]).into_iter().flat_map(|x| [x as i128, -(x as i128)]) {
            let e0 = a0 / b0;
            let check = |b1: i128, e1: i128| {
                b2 * e1 + b1 * e2 == a3 && b2 * e0 + b1 * e1 + b0 * e2 == a2 && b1 * e0 + b0 * e1 == a1
            };
            let det = e2 * b0 - b2 * e0;
            if det != 0 {
                let nb = a3 * b0 - b2 * a1;
                let ne = e2 * a1 - e0 * a3;
                if nb % det == 0 && ne % det == 0 && check(nb / det, ne / det) {
                    return true;
                }
                continue;
            }
            // e1 = (a3 - b1 e2)/b2 and b1 e1 = a2 - b2 e0 - b0 e2
            let k = a2 - b2 * e0 - b0 * e2;
            let disc = a3 * a3 - 4 * e2 * k * b2;
            if let Some(r) = isqrt_exact(disc) {
                for num in [a3 + r, a3 - r] {
                    if num % (2 * e2) != 0 {
                        continue;
                    }
                    let b1 = num / (2 * e2);
                    let t = a3 - b1 * e2;
                    if t % b2 == 0 && check(b1, t / b2) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Irreducibility over Q for primitive polynomials of degree at most 4.
pub fn is_irreducible_small(c: &[i64]) -> bool {
    let k = c.len() - 1;
    match k {
        0 => false,
        1 => true,
        2 | 3 => !has_rational_root(c),
        4 => !has_rational_root(c) && !has_quadratic_factor(c),
        _ => panic!("degree {k} is outside the small-degree test"),
    }
}

fn gcd_all(c: &[i64]) -> i64 {
    c.iter().fold(0i64, |g, x| g.gcd(x))
}

enum Verdict {
    In(MahlerEstimate),
    Out,
}

fn judge(c: &[i64], bound: f64) -> Result<Verdict> {
    let k = c.len() - 1;
    let f = IntPolynomial::from_i64(c);
    let m = mahler_measure(&f, MAHLER_TOL)?;
    let kb = k as f64 * bound;
    if m.upper < kb {
        Ok(Verdict::In(m))
    } else if m.lower >= kb {
        Ok(Verdict::Out)
    } else {
        Err(Error::NotCertified(format!(
            "height of a root of {f} is within {:.1e} of the bound",
            m.width()
        )))
    }
}

/// Iterate over all vectors `c` with `|c_i| <= lim_i` for `i < k` and fixed
/// leading coefficient.
fn scan_leading(k: usize, lead: i64, lim: &[i64], bound: f64) -> Result<Vec<(Vec<i64>, MahlerEstimate)>> {
    let mut out = Vec::new();
    let mut c: Vec<i64> = lim[..k].iter().map(|l| -l).collect();
    c.push(lead);
    loop {
        let f0_ok = c[0] != 0 || (k == 1 && lead == 1);
        if f0_ok && gcd_all(&c) == 1 && is_irreducible_small(&c) {
            if let Verdict::In(m) = judge(&c, bound)? {
                out.push((c.clone(), m));
            }
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            if c[i] < lim[i] {
                c[i] += 1;
                break;
            }
            c[i] = -lim[i];
            i += 1;
        }
    }
}

/// All algebraic numbers `a` with `deg a <= max_degree` and `h(a) < bound`,
/// grouped by minimal polynomial.
pub fn enumerate_bounded(max_degree: usize, bound: f64) -> Result<Enumeration> {
    if max_degree == 0 {
        return Err(Error::InvalidInput("degree bound must be at least 1".into()));
    }
    if !bound.is_finite() {
        return Err(Error::InvalidInput(format!("height bound {bound} is not finite")));
    }
    if max_degree > MAX_ENUM_DEGREE || bound > MAX_ENUM_BOUND {
        return Err(Error::BudgetExceeded(format!(
            "enumeration limited to degree <= {MAX_ENUM_DEGREE} and bound <= {MAX_ENUM_BOUND}"
        )));
    }
    let mut polynomials = Vec::new();
    if bound > 0.0 {
        let mut jobs = Vec::new();
        let mut total: u64 = 0;
        for k in 1..=max_degree {
            let lim = coefficient_box(k, bound);
            let inner: u64 = lim[..k].iter().map(|l| 2 * *l as u64 + 1).product();
            total = total.saturating_add(inner.saturating_mul(lim[k].max(0) as u64));
            for lead in 1..=lim[k] {
                jobs.push((k, lead, lim.clone()));
            }
        }
        if total > MAX_ENUM_CANDIDATES {
            return Err(Error::BudgetExceeded(format!(
                "coefficient box has {total} candidates (limit {MAX_ENUM_CANDIDATES})"
            )));
        }
        let found: Vec<Vec<(Vec<i64>, MahlerEstimate)>> = jobs
            .par_iter()
            .map(|(k, lead, lim)| scan_leading(*k, *lead, lim, bound))
            .collect::<Result<_>>()?;
        for (c, m) in found.into_iter().flatten() {
            let k = c.len() - 1;
            let f = IntPolynomial::from_i64(&c);
            polynomials.push(EnumeratedPoly {
                display: f.to_string(),
                polynomial: f,
                degree: k,
                roots: k,
                log_mahler: m,
                height_lower: (m.lower / k as f64).max(0.0),
                height_upper: m.upper / k as f64,
            });
        }
    }
    polynomials.sort_by(|a, b| {
        (a.degree, a.polynomial.coeffs().iter().rev().collect::<Vec<_>>())
            .cmp(&(b.degree, b.polynomial.coeffs().iter().rev().collect::<Vec<_>>()))
    });
    let count = polynomials.iter().map(|p| p.roots).sum();
    Ok(Enumeration { max_degree, bound, polynomials, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_degree_irreducibility() {
        assert!(is_irreducible_small(&[1, 0, 0, 0, 1]));
        assert!(is_irreducible_small(&[1, 0, -1, 0, 1]));
        // x^4 + 4 = (x^2 + 2x + 2)(x^2 - 2x + 2)
        assert!(!is_irreducible_small(&[4, 0, 0, 0, 1]));
        // (x^2 + 1)^2
        assert!(!is_irreducible_small(&[1, 0, 2, 0, 1]));
        // (x^2 + x + 1)(2x^2 - 3)
        assert!(!is_irreducible_small(&[-3, -3, -1, 2, 2]));
        assert!(is_irreducible_small(&[-2, 0, 1]));
        assert!(!is_irreducible_small(&[-4, 0, 1]));
    }

    #[test]
    fn rationals_of_height_log2() {
        let e = enumerate_bounded(1, 2f64.ln() + 1e-6).unwrap();
        assert_eq!(e.count, 7);
    }

    #[test]
    fn kronecker_over_q() {
        let e = enumerate_bounded(1, 1e-9).unwrap();
        let polys: Vec<String> = e.polynomials.iter().map(|p| p.display.clone()).collect();
        assert_eq!(e.count, 3, "{polys:?}");
    }

    #[test]
    fn budget_guard() {
        assert!(matches!(enumerate_bounded(5, 0.1), Err(Error::BudgetExceeded(_))));
        assert!(matches!(enumerate_bounded(4, 1.0), Err(Error::BudgetExceeded(_))));
    }
}
