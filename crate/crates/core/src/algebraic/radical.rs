//! Radical monomials `ζ · ∏ ℓ^(c_ℓ)` with rational exponents.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::degree;
use super::poly::IntPolynomial;
use crate::error::{Error, Result};
use crate::exact::{is_prime, LogLinear};
use crate::json;

/// A nonzero algebraic number `e^(2πi·turn) · exp(Σ c_ℓ log ℓ)`.
///
/// Every product of such numbers is again one, so multiplication is closed.
/// The absolute value is stored as a [`LogLinear`] exponent vector and the
/// argument as a rational number of turns in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadicalMonomial {
    turn: BigRational,
    log_abs: LogLinear,
}

/// One factor `(p/q)^t` of the display form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalFactor {
    pub p: BigUint,
    pub q: BigUint,
    pub t: BigRational,
}

fn reduce_turn(t: BigRational) -> BigRational {
    let f = t.floor();
    t - f
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl RadicalMonomial {
    pub fn one() -> Self {
        RadicalMonomial { turn: BigRational::zero(), log_abs: LogLinear::zero() }
    }

    pub fn from_parts(turn: BigRational, log_abs: LogLinear) -> Self {
        RadicalMonomial { turn: reduce_turn(turn), log_abs }
    }

    pub fn from_rational(r: &BigRational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidInput("zero is not a radical monomial".into()));
        }
        let turn = if r.is_negative() { rat(1, 2) } else { BigRational::zero() };
        Ok(RadicalMonomial { turn, log_abs: LogLinear::ln_rational(r)? })
    }

    pub fn from_integer(n: i64) -> Result<Self> {
        RadicalMonomial::from_rational(&BigRational::from_integer(n.into()))
    }

    /// `ζ_m^k`.
    pub fn root_of_unity(m: u64, k: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("root of unity of order 0".into()));
        }
        Ok(RadicalMonomial::from_parts(rat(k, m as i64), LogLinear::zero()))
    }

    /// `(p/q)^(1/d)` with `p` prime and `q` prime or 1.
    pub fn make_radical(p: u64, q: u64, d: u64) -> Result<Self> {
        RadicalMonomial::make_radical_big(&BigUint::from(p), &BigUint::from(q), d)
    }

    pub fn make_radical_big(p: &BigUint, q: &BigUint, d: u64) -> Result<Self> {
        if p == q {
            return Err(Error::DegenerateRadical(p.to_string()));
        }
        if d == 0 {
            return Err(Error::InvalidInput("root index must be positive".into()));
        }
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if !q.is_one() && !is_prime(q) {
            return Err(Error::InvalidInput(format!("{q} is neither prime nor 1")));
        }
        let k = BigRational::new(BigInt::one(), BigInt::from(d));
        let log_abs = &LogLinear::ln_of(p).scale(&k) - &LogLinear::ln_of(q).scale(&k);
        Ok(RadicalMonomial { turn: BigRational::zero(), log_abs })
    }

    pub fn turn(&self) -> &BigRational {
        &self.turn
    }

    /// `log |a|`.
    pub fn log_abs(&self) -> &LogLinear {
        &self.log_abs
    }

    /// Order of the root-of-unity part.
    pub fn zeta_order(&self) -> BigInt {
        self.turn.denom().clone()
    }

    pub fn is_real(&self) -> bool {
        self.turn.is_zero() || self.turn == rat(1, 2)
    }

    pub fn is_positive_real(&self) -> bool {
        self.turn.is_zero()
    }

    /// Least common denominator `D` of the exponents, so `|a|^D` is rational.
    pub fn exponent_denominator(&self) -> BigInt {
        self.log_abs
            .terms()
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// The value as a rational number, if it is one.
    pub fn as_rational(&self) -> Option<BigRational> {
        if !self.is_real() || !self.exponent_denominator().is_one() {
            return None;
        }
        let mut v = BigRational::one();
        for (p, c) in self.log_abs.terms() {
            let e = c.numer().to_i32()?;
            v *= num_traits::pow::Pow::pow(
                BigRational::from_integer(BigInt::from(p.clone())),
                e,
            );
        }
        Some(if self.turn.is_zero() { v } else { -v })
    }

    pub fn multiply(&self, other: &RadicalMonomial) -> RadicalMonomial {
        RadicalMonomial::from_parts(&self.turn + &other.turn, &self.log_abs + &other.log_abs)
    }

    pub fn pow(&self, n: i64) -> RadicalMonomial {
        let k = BigRational::from_integer(n.into());
        RadicalMonomial::from_parts(&self.turn * &k, self.log_abs.scale(&k))
    }

    pub fn inverse(&self) -> RadicalMonomial {
        self.pow(-1)
    }

    /// The positive real `n`-th root. Requires a positive real argument.
    pub fn nth_root(&self, n: u64) -> Result<RadicalMonomial> {
        if n == 0 {
            return Err(Error::InvalidInput("root index must be positive".into()));
        }
        if !self.turn.is_zero() {
            return Err(Error::AmbiguousRoot);
        }
        let k = BigRational::new(BigInt::one(), BigInt::from(n));
        Ok(RadicalMonomial { turn: BigRational::zero(), log_abs: self.log_abs.scale(&k) })
    }

    /// `[Q(a) : Q]`.
    pub fn degree(&self) -> Result<BigUint> {
        degree::monomial_degree(self)
    }

    /// Minimal polynomial for real monomials: `den·x^D ∓ num` with `a^D = ±num/den`.
    pub fn minimal_polynomial(&self) -> Result<IntPolynomial> {
        if !self.is_real() {
            return Err(Error::InvalidInput(
                "minimal polynomial is only produced for real monomials".into(),
            ));
        }
        let d = self.exponent_denominator();
        let dd = d
            .to_u64()
            .filter(|&v| v <= 1 << 16)
            .ok_or_else(|| Error::BudgetExceeded(format!("degree {d} too large")))?;
        let r = self
            .pow(dd as i64)
            .as_rational()
            .expect("a^D is rational by construction");
        let mut coeffs = vec![BigInt::zero(); dd as usize + 1];
        coeffs[0] = -r.numer().clone();
        coeffs[dd as usize] = r.denom().clone();
        Ok(IntPolynomial::new(coeffs))
    }

    /// Numerical value as `(re, im)`.
    pub fn to_complex(&self) -> (f64, f64) {
        let m = self.log_abs.approx().exp();
        let a = 2.0 * std::f64::consts::PI * self.turn.to_f64().unwrap_or(0.0);
        (m * a.cos(), m * a.sin())
    }

    /// Display form: root-of-unity exponent, integer-exponent scalar, and
    /// fractional factors paired as `(p/q)^t` where possible.
    pub fn display_parts(&self) -> ((BigInt, BigInt), BigRational, Vec<RadicalFactor>) {
        let zeta = (self.turn.denom().clone(), self.turn.numer().clone());
        let mut scalar = BigRational::one();
        let mut pos: Vec<(BigUint, BigRational)> = Vec::new();
        let mut neg: Vec<(BigUint, BigRational)> = Vec::new();
        for (p, c) in self.log_abs.terms() {
            if c.is_integer() {
                let e = c.numer().to_i32().unwrap_or(i32::MAX);
                scalar *= num_traits::pow::Pow::pow(
                    BigRational::from_integer(BigInt::from(p.clone())),
                    e,
                );
            } else if c.is_positive() {
                pos.push((p.clone(), c.clone()));
            } else {
                neg.push((p.clone(), -c));
            }
        }
        let mut factors = Vec::new();
        for (p, t) in pos {
            if let Some(i) = neg.iter().position(|(_, s)| *s == t) {
                let (q, _) = neg.remove(i);
                factors.push(RadicalFactor { p, q, t });
            } else {
                factors.push(RadicalFactor { p, q: BigUint::one(), t });
            }
        }
        for (q, t) in neg {
            factors.push(RadicalFactor { p: q, q: BigUint::one(), t: -t });
        }
        factors.sort_by(|a, b| a.p.cmp(&b.p));
        if self.turn == rat(1, 2) {
            return ((BigInt::one(), BigInt::zero()), -scalar, factors);
        }
        (zeta, scalar, factors)
    }
}

impl fmt::Display for RadicalMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ((m, k), scalar, factors) = self.display_parts();
        let mut parts: Vec<String> = Vec::new();
        if !k.is_zero() {
            parts.push(format!("zeta_{m}^{k}"));
        }
        let sign = if scalar.is_negative() { "-" } else { "" };
        let scalar = scalar.abs();
        if !scalar.is_one() || factors.is_empty() && parts.is_empty() {
            parts.push(scalar.to_string());
        }
        for RadicalFactor { p, q, t } in factors {
            let base = if q.is_one() { p.to_string() } else { format!("({p}/{q})") };
            parts.push(format!("{base}^({t})"));
        }
        write!(f, "{sign}{}", parts.join("*"))
    }
}

/// Parses `*`-separated factors, each `zeta_m`, `zeta_m^k`, a rational
/// `a/b`, or a positive rational power `a/b^e` / `a^e` with `e` a rational
/// such as `1/2` or `(3/4)`. So `5/7^1/2` is `(5/7)^(1/2)`.
impl std::str::FromStr for RadicalMonomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidInput(format!("cannot parse {s:?} as a radical: {why}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        let mut out = RadicalMonomial::one();
        for factor in compact.split('*') {
            let f = if let Some(z) = factor.strip_prefix("zeta_") {
                let (m, k) = z.split_once('^').unwrap_or((z, "1"));
                let m: u64 = m.parse().map_err(|_| bad("bad root-of-unity order"))?;
                let k: i64 = k.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| bad("bad root-of-unity power"))?;
                RadicalMonomial::root_of_unity(m, k)?
            } else if let Some((base, e)) = factor.split_once('^') {
                let base = json::parse_rational(base.trim_matches(|c| c == '(' || c == ')')).map_err(|e| bad(&e))?;
                let e = json::parse_rational(e.trim_matches(|c| c == '(' || c == ')')).map_err(|e| bad(&e))?;
                if !base.is_positive() {
                    return Err(bad("only positive bases may carry an exponent"));
                }
                RadicalMonomial::from_parts(BigRational::zero(), LogLinear::ln_rational(&base)?.scale(&e))
            } else {
                let r = json::parse_rational(factor).map_err(|e| bad(&e))?;
                RadicalMonomial::from_rational(&r)?
            };
            out = out.multiply(&f);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct RadicalDto {
    zeta: (serde_json::Value, serde_json::Value),
    scalar: String,
    factors: Vec<(serde_json::Value, serde_json::Value, String)>,
}

impl Serialize for RadicalMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let ((m, k), scalar, factors) = self.display_parts();
        let int = |n: &BigInt| match n.to_i64() {
            Some(v) => serde_json::Value::from(v),
            None => serde_json::Value::from(n.to_string()),
        };
        RadicalDto {
            zeta: (int(&m), int(&k)),
            scalar: json::rational_string(&scalar),
            factors: factors
                .iter()
                .map(|f| {
                    (json::biguint_value(&f.p), json::biguint_value(&f.q), json::rational_string(&f.t))
                })
                .collect(),
        }
        .serialize(s)
    }
}

fn value_int(v: &serde_json::Value) -> std::result::Result<BigInt, String> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| format!("expected an integer, got {n}")),
        serde_json::Value::String(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        _ => Err(format!("expected an integer, got {v}")),
    }
}

impl<'de> Deserialize<'de> for RadicalMonomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = RadicalDto::deserialize(d)?;
        let m = value_int(&dto.zeta.0).map_err(D::Error::custom)?;
        let k = value_int(&dto.zeta.1).map_err(D::Error::custom)?;
        if !m.is_positive() {
            return Err(D::Error::custom("zeta order must be positive"));
        }
        let scalar = json::parse_rational(&dto.scalar).map_err(D::Error::custom)?;
        let mut out = RadicalMonomial::from_rational(&scalar).map_err(D::Error::custom)?;
        out = out.multiply(&RadicalMonomial::from_parts(BigRational::new(k, m), LogLinear::zero()));
        for (p, q, t) in dto.factors {
            let p = json::biguint_from_value(&p).map_err(D::Error::custom)?;
            let q = json::biguint_from_value(&q).map_err(D::Error::custom)?;
            let t = json::parse_rational(&t).map_err(D::Error::custom)?;
            if p.is_zero() || q.is_zero() {
                return Err(D::Error::custom("factor bases must be positive"));
            }
            let l = &LogLinear::ln_of(&p).scale(&t) - &LogLinear::ln_of(&q).scale(&t);
            out = out.multiply(&RadicalMonomial::from_parts(BigRational::zero(), l));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_radical_examples() {
        let a = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        assert_eq!(a.minimal_polynomial().unwrap().coeffs(), &[BigInt::from(-5), 0.into(), 7.into()]);
        assert_eq!(a.degree().unwrap(), BigUint::from(2u32));
        let two = RadicalMonomial::make_radical(2, 1, 1).unwrap();
        assert_eq!(two.as_rational(), Some(rat(2, 1)));
        assert_eq!(two.degree().unwrap(), BigUint::one());
        let b = RadicalMonomial::make_radical(2, 1, 6).unwrap();
        let mp = b.minimal_polynomial().unwrap();
        assert_eq!(mp.degree(), 6);
        assert!(matches!(
            RadicalMonomial::make_radical(3, 3, 2),
            Err(Error::DegenerateRadical(_))
        ));
    }

    #[test]
    fn parse_forms() {
        let a: RadicalMonomial = "5/7^1/2".parse().unwrap();
        assert_eq!(a, RadicalMonomial::make_radical(5, 7, 2).unwrap());
        let b: RadicalMonomial = "zeta_8^3*2^(1/3)".parse().unwrap();
        assert_eq!(b.turn(), &rat(3, 8));
        assert_eq!(b.log_abs(), &LogLinear::ln_u64(2).scale(&rat(1, 3)));
        assert_eq!("-3/4".parse::<RadicalMonomial>().unwrap().as_rational(), Some(rat(-3, 4)));
        for bad in ["", "0", "-2^1/2", "x", "zeta_0"] {
            assert!(bad.parse::<RadicalMonomial>().is_err(), "{bad}");
        }
    }

    #[test]
    fn roots_and_products() {
        let a = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        assert_eq!(a.nth_root(3).unwrap(), RadicalMonomial::make_radical(5, 7, 6).unwrap());
        let two = RadicalMonomial::from_integer(2).unwrap();
        assert_eq!(two.nth_root(1).unwrap(), two);
        assert_eq!(a.multiply(&a).as_rational(), Some(rat(5, 7)));
        assert_eq!(a.multiply(&RadicalMonomial::one()), a);
        let z = RadicalMonomial::root_of_unity(4, 1).unwrap();
        assert_eq!(z.multiply(&a).nth_root(2), Err(Error::AmbiguousRoot));
        let prod = RadicalMonomial::make_radical(5, 7, 1)
            .unwrap()
            .multiply(&RadicalMonomial::make_radical(37, 41, 1).unwrap());
        let r = prod.nth_root(2).unwrap();
        assert_eq!(
            r,
            RadicalMonomial::make_radical(5, 7, 2)
                .unwrap()
                .multiply(&RadicalMonomial::make_radical(37, 41, 2).unwrap())
        );
    }

    #[test]
    fn display_and_json() {
        let a = RadicalMonomial::make_radical(5, 7, 2).unwrap();
        assert_eq!(a.to_string(), "(5/7)^(1/2)");
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"zeta":[1,0],"scalar":"1/1","factors":[[5,7,"1/2"]]}"#);
        let back: RadicalMonomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let neg = RadicalMonomial::from_integer(-12).unwrap();
        assert_eq!(neg.to_string(), "-12");
        let back: RadicalMonomial = serde_json::from_str(&serde_json::to_string(&neg).unwrap()).unwrap();
        assert_eq!(back, neg);
    }

    #[test]
    fn power_d_is_rational() {
        let a = RadicalMonomial::make_radical(5, 7, 2)
            .unwrap()
            .multiply(&RadicalMonomial::make_radical(37, 41, 5).unwrap())
            .multiply(&RadicalMonomial::root_of_unity(3, 1).unwrap());
        let d = a.exponent_denominator().to_i64().unwrap();
        assert_eq!(d, 10);
        assert!(a.pow(d * 3).as_rational().is_some());
    }
}
