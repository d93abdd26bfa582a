//! Absolute logarithmic Weil heights, projective heights and weights.

pub mod weight;

pub use weight::{Eligibility, LimitClass, LimitRatio, Tail, Weight};

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebraic::RadicalMonomial;
use crate::error::{Error, Result};
use crate::exact::{LogLinear, Real};

/// `h(a)` for a radical monomial.
///
/// With `log|a| = P - Q` split into positive and negative prime parts, the
/// archimedean place contributes `max(0, P - Q)` and the finite places
/// contribute `Q`, so `h(a) = max(P, Q)`. Roots of unity do not change any
/// absolute value.
pub fn weil_height(a: &RadicalMonomial) -> LogLinear {
    let l = a.log_abs();
    l.positive_part().max(l.negative_part())
}

/// `h(x)` for a rational number; `h(0) = 0`.
pub fn rational_height(x: &BigRational) -> LogLinear {
    if x.is_zero() {
        return LogLinear::zero();
    }
    let m = x.numer().magnitude().max(x.denom().magnitude()).clone();
    LogLinear::ln_of(&m)
}

/// `w(deg a) · h(a)`.
pub fn weighted_height(a: &RadicalMonomial, w: &Weight) -> Result<Real> {
    let h = weil_height(a);
    if h.is_zero() {
        return Ok(Real::zero());
    }
    let wd = w.eval(&a.degree()?)?;
    Ok(wd.mul(&Real::from(h)))
}

/// A point of projective space with exactly analyzable coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "entries", rename_all = "snake_case")]
pub enum ProjectiveTuple {
    Rational(#[serde(with = "rat_vec")] Vec<BigRational>),
    /// Entries are radical monomials or zero.
    Radical(Vec<Option<RadicalMonomial>>),
}

mod rat_vec {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(crate::json::rational_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| crate::json::parse_rational(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

impl ProjectiveTuple {
    pub fn from_i64(v: &[i64]) -> Self {
        ProjectiveTuple::Rational(v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    /// `(r_i · ζ_m^(k_i) · β^(e_i))_i`; a zero `r_i` gives a zero entry.
    pub fn twisted(
        beta: &RadicalMonomial,
        entries: &[(BigRational, u64, i64, u32)],
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (r, m, k, e) in entries {
            if r.is_zero() {
                out.push(None);
                continue;
            }
            let x = RadicalMonomial::from_rational(r)?
                .multiply(&RadicalMonomial::root_of_unity(*m, *k)?)
                .multiply(&beta.pow(*e as i64));
            out.push(Some(x));
        }
        Ok(ProjectiveTuple::Radical(out))
    }

    pub fn len(&self) -> usize {
        match self {
            ProjectiveTuple::Rational(v) => v.len(),
            ProjectiveTuple::Radical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn monomials(&self) -> Result<Vec<RadicalMonomial>> {
        let out: Vec<RadicalMonomial> = match self {
            ProjectiveTuple::Rational(v) => v
                .iter()
                .filter(|x| !x.is_zero())
                .map(RadicalMonomial::from_rational)
                .collect::<Result<_>>()?,
            ProjectiveTuple::Radical(v) => v.iter().flatten().cloned().collect(),
        };
        if out.is_empty() {
            return Err(Error::InvalidTuple("all entries are zero".into()));
        }
        Ok(out)
    }

    /// Primitive integer representative of a rational tuple.
    pub fn primitive_integers(&self) -> Result<Vec<BigInt>> {
        let ProjectiveTuple::Rational(v) = self else {
            return Err(Error::InvalidInput("tuple is not rational".into()));
        };
        if v.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidTuple("all entries are zero".into()));
        }
        let den = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<BigInt> = v
            .iter()
            .map(|x| (x * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        Ok(ints.into_iter().map(|x| x / &g).collect())
    }
}

/// Per-prime maximum of `-v_p`-style exponents: `Σ_p max_i(-c_{i,p}) log p`.
fn finite_part(ms: &[RadicalMonomial]) -> LogLinear {
    let mut primes: BTreeMap<BigUint, BigRational> = BTreeMap::new();
    for m in ms {
        for p in m.log_abs().terms().keys() {
            primes.entry(p.clone()).or_insert_with(BigRational::zero);
        }
    }
    LogLinear::from_terms(primes.into_keys().map(|p| {
        let best = ms
            .iter()
            .map(|m| -m.log_abs().coeff(&p))
            .max()
            .expect("tuple is nonempty");
        (p, best)
    }))
}

/// `h(x_0 : ... : x_n) = Σ_v max_i log |x_i|_v`.
pub fn projective_height(t: &ProjectiveTuple) -> Result<LogLinear> {
    let ms = t.monomials()?;
    let arch = ms
        .iter()
        .map(|m| m.log_abs().clone())
        .reduce(|a, b| a.max(b))
        .unwrap();
    Ok(&arch + &finite_part(&ms))
}

/// `h_2`: Euclidean norm at the archimedean place, maximum at finite places.
pub fn h2_height(t: &ProjectiveTuple) -> Result<Real> {
    let ms = t.monomials()?;
    let mut sq = Real::zero();
    for m in &ms {
        // |x|^2 = exp(2 log|x|) as a product of rational powers
        let mut term = Real::one();
        for (p, c) in m.log_abs().terms() {
            let two_c = c * BigRational::from_integer(2.into());
            term = term.mul(&Real::pow(&BigRational::from_integer(p.clone().into()), &two_c)?);
        }
        sq = sq.add(&term);
    }
    let arch = sq.ln()?.mul(&Real::rat(1, 2));
    Ok(arch.add(&Real::from(finite_part(&ms))))
}

/// `h_2` of a rational tuple through its primitive integer representative.
pub fn h2_rational(t: &ProjectiveTuple) -> Result<LogLinear> {
    let ints = t.primitive_integers()?;
    let s: BigInt = ints.iter().map(|x| x * x).sum();
    Ok(LogLinear::ln_of(s.magnitude()).scale(&BigRational::new(1.into(), 2.into())))
}

/// Height of a rational tuple through the gcd/max formula.
pub fn projective_height_rational(t: &ProjectiveTuple) -> Result<LogLinear> {
    let ints = t.primitive_integers()?;
    let m = ints.iter().map(|x| x.abs()).max().unwrap();
    Ok(LogLinear::ln_of(m.magnitude()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn weil_examples() {
        let a = RadicalMonomial::from_rational(&q(5, 7)).unwrap();
        assert_eq!(weil_height(&a), LogLinear::ln_u64(7));
        let i = RadicalMonomial::root_of_unity(4, 1).unwrap();
        assert!(weil_height(&i).is_zero());
        let r = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        assert_eq!(weil_height(&r), LogLinear::ln_u64(7).scale(&q(1, 2)));
    }

    #[test]
    fn weighted_examples() {
        let r = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        let h1 = weighted_height(&r, &Weight::constant(1)).unwrap();
        assert_eq!(h1.as_loglinear().unwrap(), LogLinear::ln_u64(7).scale(&q(1, 2)));
        let hd = weighted_height(&r, &Weight::gamma(1, 1)).unwrap();
        assert_eq!(hd.as_loglinear().unwrap(), LogLinear::ln_u64(7));
        let z8 = RadicalMonomial::root_of_unity(8, 1).unwrap();
        assert_eq!(weighted_height(&z8, &Weight::Dobrowolski).unwrap(), Real::zero());
    }

    #[test]
    fn projective_examples() {
        assert_eq!(projective_height(&ProjectiveTuple::from_i64(&[3, 4])).unwrap(), LogLinear::ln_u64(4));
        assert_eq!(projective_height(&ProjectiveTuple::from_i64(&[2, 4])).unwrap(), LogLinear::ln_u64(2));
        assert!(matches!(
            projective_height(&ProjectiveTuple::from_i64(&[0, 0])),
            Err(Error::InvalidTuple(_))
        ));
        let beta = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        let t = ProjectiveTuple::twisted(
            &beta,
            &[(q(1, 1), 1, 0, 0), (q(1, 1), 3, 0, 1), (q(1, 1), 3, 1, 1), (q(1, 1), 3, 2, 1)],
        )
        .unwrap();
        assert_eq!(projective_height(&t).unwrap(), weil_height(&beta));
    }

    #[test]
    fn h2_examples() {
        let l5 = LogLinear::ln_u64(5);
        assert_eq!(h2_height(&ProjectiveTuple::from_i64(&[3, 4])).unwrap().as_loglinear().unwrap(), l5);
        assert_eq!(h2_height(&ProjectiveTuple::from_i64(&[1, 0, 0])).unwrap(), Real::zero());
        assert_eq!(h2_height(&ProjectiveTuple::from_i64(&[6, 8])).unwrap().as_loglinear().unwrap(), l5);
        assert_eq!(h2_rational(&ProjectiveTuple::from_i64(&[6, 8])).unwrap(), l5);
    }
}
