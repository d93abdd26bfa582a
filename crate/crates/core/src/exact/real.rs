//! Symbolic real expressions with certified comparison.
//!
//! Thresholds such as `N d c / w(N D)` leave the log-linear world as soon as
//! the weight is irrational (`w(d) = d^(1/2)`, `d / log d`, ...). [`Real`]
//! keeps such values as small expression trees. Constructors fold everything
//! that stays rational or log-linear, so comparisons between foldable values
//! are exact and the rest are decided by interval refinement.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::interval::Interval;
use super::loglinear::LogLinear;
use crate::error::{Error, Result};

/// Precision ceiling for comparisons that cannot be folded exactly.
pub const MAX_COMPARE_BITS: u32 = 1 << 16;

/// Largest power we are willing to expand into an exact rational.
const MAX_POW_BITS: u64 = 1 << 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Real {
    Rat(BigRational),
    /// A nonzero log-linear value.
    Log(LogLinear),
    /// `base^exp` with `base > 0`, never rational.
    Pow(BigRational, BigRational),
    Ln(Box<Real>),
    Sum(Vec<Real>),
    Prod(Vec<Real>),
    Recip(Box<Real>),
    Max(Box<Real>, Box<Real>),
    Min(Box<Real>, Box<Real>),
}

impl From<LogLinear> for Real {
    fn from(l: LogLinear) -> Self {
        if l.is_zero() {
            Real::Rat(BigRational::zero())
        } else {
            Real::Log(l)
        }
    }
}

impl From<BigRational> for Real {
    fn from(r: BigRational) -> Self {
        Real::Rat(r)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::Rat(BigRational::from_integer(n.into()))
    }
}

impl From<u64> for Real {
    fn from(n: u64) -> Self {
        Real::Rat(BigRational::from_integer(n.into()))
    }
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    if Pow::pow(&r, k) == *n {
        Some(r)
    } else {
        None
    }
}

/// Split a log-linear value into `k · primitive` with the first coefficient
/// of `primitive` equal to one.
fn normalize_log(l: &LogLinear) -> (BigRational, LogLinear) {
    let k = l.terms().values().next().cloned().unwrap_or_else(BigRational::one);
    (k.clone(), l.scale(&k.recip()))
}

/// `(c, core)` with `x = c · core`.
fn split_coeff(x: &Real) -> (BigRational, Real) {
    match x {
        Real::Prod(v) => {
            if let Some(Real::Rat(c)) = v.first() {
                let rest: Vec<Real> = v[1..].to_vec();
                let core = if rest.len() == 1 { rest[0].clone() } else { Real::Prod(rest) };
                (c.clone(), core)
            } else {
                (BigRational::one(), x.clone())
            }
        }
        _ => (BigRational::one(), x.clone()),
    }
}

impl Real {
    pub fn zero() -> Real {
        Real::Rat(BigRational::zero())
    }

    pub fn one() -> Real {
        Real::Rat(BigRational::one())
    }

    pub fn rat(n: i64, d: i64) -> Real {
        Real::Rat(BigRational::new(n.into(), d.into()))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Real::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// The value as a log-linear combination, when it is one.
    pub fn as_loglinear(&self) -> Option<LogLinear> {
        match self {
            Real::Log(l) => Some(l.clone()),
            Real::Rat(r) if r.is_zero() => Some(LogLinear::zero()),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Rat(_) | Real::Log(_))
    }

    /// `base^exp` for a positive rational base.
    pub fn pow(base: &BigRational, exp: &BigRational) -> Result<Real> {
        if !base.is_positive() {
            return Err(Error::InvalidInput(format!("power of non-positive base {base}")));
        }
        if exp.is_zero() || base.is_one() {
            return Ok(Real::one());
        }
        let den = exp
            .denom()
            .to_u32()
            .ok_or_else(|| Error::BudgetExceeded(format!("exponent {exp} too large")))?;
        let num = exp.numer().abs();
        let bits = (base.numer().bits() + base.denom().bits()) * num.to_u64().unwrap_or(u64::MAX);
        if num.bits() > 32 || bits > MAX_POW_BITS {
            return Err(Error::BudgetExceeded(format!("power {base}^{exp} too large")));
        }
        let a = num.to_u32().unwrap();
        if let (Some(rn), Some(rd)) = (exact_root(base.numer(), den), exact_root(base.denom(), den)) {
            let root = BigRational::new(rn, rd);
            let v = Pow::pow(&root, a);
            return Ok(Real::Rat(if exp.is_negative() { v.recip() } else { v }));
        }
        Ok(Real::Pow(base.clone(), exp.clone()))
    }

    pub fn pow_int(base: u64, exp: &BigRational) -> Result<Real> {
        Real::pow(&BigRational::from_integer(base.into()), exp)
    }

    pub fn ln(&self) -> Result<Real> {
        match self {
            Real::Rat(r) => {
                if !r.is_positive() {
                    return Err(Error::InvalidInput(format!("logarithm of {r}")));
                }
                Ok(Real::from(LogLinear::ln_rational(r)?))
            }
            Real::Pow(b, e) => Ok(Real::from(LogLinear::ln_rational(b)?.scale(e))),
            Real::Recip(x) => Ok(x.ln()?.neg()),
            Real::Prod(v) if v.iter().all(|f| matches!(f, Real::Rat(_) | Real::Pow(..))) => {
                let mut acc = Real::zero();
                for f in v {
                    acc = acc.add(&f.ln()?);
                }
                Ok(acc)
            }
            _ => Ok(Real::Ln(Box::new(self.clone()))),
        }
    }

    pub fn neg(&self) -> Real {
        self.mul(&Real::Rat(-BigRational::one()))
    }

    pub fn add(&self, other: &Real) -> Real {
        let mut flat = Vec::new();
        for x in [self, other] {
            match x {
                Real::Sum(v) => flat.extend(v.iter().cloned()),
                _ => flat.push(x.clone()),
            }
        }
        let mut constant = BigRational::zero();
        let mut log = LogLinear::zero();
        let mut others: Vec<(BigRational, Real)> = Vec::new();
        for t in flat {
            match t {
                Real::Rat(r) => constant += r,
                Real::Log(l) => log = &log + &l,
                _ => {
                    let (c, core) = split_coeff(&t);
                    if let Some(slot) = others.iter_mut().find(|(_, k)| *k == core) {
                        slot.0 += c;
                    } else {
                        others.push((c, core));
                    }
                }
            }
        }
        let mut terms = Vec::new();
        if !constant.is_zero() {
            terms.push(Real::Rat(constant));
        }
        if !log.is_zero() {
            terms.push(Real::Log(log));
        }
        for (c, core) in others {
            if !c.is_zero() {
                terms.push(core.mul(&Real::Rat(c)));
            }
        }
        match terms.len() {
            0 => Real::zero(),
            1 => terms.pop().unwrap(),
            _ => Real::Sum(terms),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Real) -> Real {
        let mut flat = Vec::new();
        for x in [self, other] {
            match x {
                Real::Prod(v) => flat.extend(v.iter().cloned()),
                _ => flat.push(x.clone()),
            }
        }
        let mut coeff = BigRational::one();
        let mut pows: Vec<(BigRational, BigRational)> = Vec::new();
        let mut rest: Vec<Real> = Vec::new();
        let mut recips: Vec<Real> = Vec::new();
        for f in flat {
            match f {
                Real::Rat(r) => coeff *= r,
                Real::Recip(inner) => match *inner {
                    Real::Log(l) => {
                        let (k, prim) = normalize_log(&l);
                        coeff /= k;
                        recips.push(Real::Log(prim));
                    }
                    other => recips.push(other),
                },
                Real::Log(l) => {
                    let (k, prim) = normalize_log(&l);
                    coeff *= k;
                    rest.push(Real::Log(prim));
                }
                Real::Pow(b, e) => pows.push((b, e)),
                other => rest.push(other),
            }
        }
        if coeff.is_zero() {
            return Real::zero();
        }
        for r in recips {
            match rest.iter().position(|x| *x == r) {
                Some(i) => {
                    rest.remove(i);
                }
                None => rest.push(Real::Recip(Box::new(r))),
            }
        }
        // merge powers sharing an exponent or a base
        let mut merged: Vec<(BigRational, BigRational)> = Vec::new();
        for (b, e) in pows {
            if let Some(slot) = merged.iter_mut().find(|(b2, e2)| *e2 == e || *b2 == b) {
                if slot.1 == e {
                    slot.0 *= b;
                } else {
                    slot.1 += e;
                }
            } else {
                merged.push((b, e));
            }
        }
        let mut factors = Vec::new();
        for (b, e) in merged {
            match Real::pow(&b, &e) {
                Ok(Real::Rat(r)) => coeff *= r,
                Ok(p) => factors.push(p),
                Err(_) => factors.push(Real::Pow(b, e)),
            }
        }
        factors.extend(rest);
        factors.sort_by_key(|f| f.to_string());
        if factors.is_empty() {
            return Real::Rat(coeff);
        }
        if factors.len() == 1 {
            if let Real::Log(l) = &factors[0] {
                return Real::Log(l.scale(&coeff));
            }
            if coeff.is_one() {
                return factors.pop().unwrap();
            }
        }
        if !coeff.is_one() {
            factors.insert(0, Real::Rat(coeff));
        }
        Real::Prod(factors)
    }

    pub fn recip(&self) -> Result<Real> {
        match self {
            Real::Rat(r) => {
                if r.is_zero() {
                    Err(Error::InvalidInput("division by zero".into()))
                } else {
                    Ok(Real::Rat(r.recip()))
                }
            }
            Real::Pow(b, e) => Real::pow(b, &-e),
            Real::Recip(x) => Ok((**x).clone()),
            Real::Log(l) => {
                let (k, prim) = normalize_log(l);
                Ok(Real::Recip(Box::new(Real::Log(prim))).mul(&Real::Rat(k.recip())))
            }
            Real::Prod(v) => {
                let mut acc = Real::one();
                for f in v {
                    acc = acc.mul(&f.recip()?);
                }
                Ok(acc)
            }
            _ => Ok(Real::Recip(Box::new(self.clone()))),
        }
    }

    pub fn div(&self, other: &Real) -> Result<Real> {
        if let (Real::Log(a), Real::Log(b)) = (self, other) {
            if let Some(k) = a.ratio_to(b) {
                return Ok(Real::Rat(k));
            }
        }
        if self == other {
            return Ok(Real::one());
        }
        Ok(self.mul(&other.recip()?))
    }

    /// Larger of two values. Undecidable pairs stay symbolic.
    pub fn max(&self, other: &Real) -> Real {
        match self.compare_with_cap(other, 4096) {
            Ok(o) if o.is_ge() => self.clone(),
            Ok(_) => other.clone(),
            Err(_) => Real::Max(Box::new(self.clone()), Box::new(other.clone())),
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        match self.compare_with_cap(other, 4096) {
            Ok(o) if o.is_le() => self.clone(),
            Ok(_) => other.clone(),
            Err(_) => Real::Min(Box::new(self.clone()), Box::new(other.clone())),
        }
    }

    pub fn approx(&self) -> f64 {
        match self {
            Real::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            Real::Log(l) => l.approx(),
            Real::Pow(b, e) => {
                let lb = LogLinear::ln_rational(b).map(|l| l.approx()).unwrap_or(f64::NAN);
                (lb * e.to_f64().unwrap_or(f64::NAN)).exp()
            }
            Real::Ln(x) => x.approx().ln(),
            Real::Sum(v) => v.iter().map(Real::approx).sum(),
            Real::Prod(v) => v.iter().map(Real::approx).product(),
            Real::Recip(x) => 1.0 / x.approx(),
            Real::Max(a, b) => a.approx().max(b.approx()),
            Real::Min(a, b) => a.approx().min(b.approx()),
        }
    }

    /// Extra bits needed so relative errors of factors stay below `2^-prec`.
    fn magnitude_guard(&self) -> u32 {
        let a = self.approx().abs();
        if a.is_finite() && a > 0.0 {
            a.log2().abs().ceil().min(1e6) as u32 + 4
        } else {
            64
        }
    }

    /// Encloses the value at `prec` fractional bits, or `None` when the
    /// precision is too low to evaluate some subterm.
    pub fn enclose(&self, prec: u32) -> Option<Interval> {
        match self {
            Real::Rat(r) => Some(Interval::from_rational(r, prec)),
            Real::Log(l) => Some(l.enclose(prec)),
            Real::Pow(b, e) => Some(Interval::rational_power(b, e, prec)),
            Real::Ln(x) => {
                let inner = x.enclose(prec + 8 + x.magnitude_guard())?;
                Some(inner.ln()?.rescale(prec))
            }
            Real::Sum(v) => {
                let work = prec + 4 + (v.len() as u32).ilog2();
                let mut acc = Interval::from_rational(&BigRational::zero(), work);
                for t in v {
                    acc = acc.add(&t.enclose(work)?);
                }
                Some(acc.rescale(prec))
            }
            Real::Prod(v) => {
                let guard: u32 = v.iter().map(Real::magnitude_guard).sum();
                let work = prec + 8 + guard;
                let mut acc = Interval::from_rational(&BigRational::one(), work);
                for t in v {
                    acc = acc.mul(&t.enclose(work)?);
                }
                Some(acc.rescale(prec))
            }
            Real::Recip(x) => {
                let work = prec + 8 + 2 * x.magnitude_guard();
                Some(x.enclose(work)?.recip()?.rescale(prec))
            }
            Real::Max(a, b) => Some(a.enclose(prec)?.max(&b.enclose(prec)?)),
            Real::Min(a, b) => Some(a.enclose(prec)?.min(&b.enclose(prec)?)),
        }
    }

    fn sign_with_cap(&self, cap: u32) -> Result<Ordering> {
        match self {
            Real::Rat(r) => return Ok(r.cmp(&BigRational::zero())),
            Real::Log(l) => return Ok(l.signum()),
            _ => {}
        }
        let mut prec = 64;
        while prec <= cap {
            if let Some(s) = self.enclose(prec).and_then(|iv| iv.sign()) {
                return Ok(s);
            }
            prec *= 2;
        }
        Err(Error::Undecided(cap))
    }

    /// Certified sign of the value.
    pub fn signum(&self) -> Result<Ordering> {
        self.sign_with_cap(MAX_COMPARE_BITS)
    }

    fn compare_with_cap(&self, other: &Real, cap: u32) -> Result<Ordering> {
        if self == other {
            return Ok(Ordering::Equal);
        }
        self.sub(other).sign_with_cap(cap)
    }

    /// Certified comparison. Exact when the difference folds to a rational or
    /// log-linear value; otherwise refined up to [`MAX_COMPARE_BITS`].
    pub fn compare(&self, other: &Real) -> Result<Ordering> {
        self.compare_with_cap(other, MAX_COMPARE_BITS)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Rat(r) => write!(f, "{r}"),
            Real::Log(l) => {
                if l.terms().len() > 1 {
                    write!(f, "({l})")
                } else {
                    write!(f, "{l}")
                }
            }
            Real::Pow(b, e) => {
                if b.is_integer() {
                    write!(f, "{b}^({e})")
                } else {
                    write!(f, "({b})^({e})")
                }
            }
            Real::Ln(x) => write!(f, "ln({x})"),
            Real::Sum(v) => {
                write!(f, "(")?;
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{t}")?;
                }
                write!(f, ")")
            }
            Real::Prod(v) => {
                for (i, t) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{t}")?;
                }
                Ok(())
            }
            Real::Recip(x) => write!(f, "1/({x})"),
            Real::Max(a, b) => write!(f, "max({a}, {b})"),
            Real::Min(a, b) => write!(f, "min({a}, {b})"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Real::Log(l) => l.serialize(s),
            Real::Rat(r) if r.is_zero() => LogLinear::zero().serialize(s),
            _ => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("expr", &self.to_string())?;
                m.serialize_entry("approx", &self.approx())?;
                m.end()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn perfect_powers_fold() {
        assert_eq!(Real::pow(&q(4, 9), &q(1, 2)).unwrap(), Real::Rat(q(2, 3)));
        assert!(matches!(Real::pow(&q(2, 1), &q(1, 2)).unwrap(), Real::Pow(..)));
        let a = Real::pow(&q(2, 1), &q(1, 2)).unwrap();
        assert_eq!(a.mul(&a), Real::Rat(q(2, 1)));
    }

    #[test]
    fn logs_of_powers_are_exact() {
        let a = Real::pow(&q(2, 1), &q(1, 3)).unwrap().ln().unwrap();
        assert_eq!(a.as_loglinear().unwrap(), LogLinear::ln_u64(2).scale(&q(1, 3)));
    }

    #[test]
    fn self_difference_cancels() {
        let x = Real::pow(&q(17, 1), &q(1, 2))
            .unwrap()
            .mul(&Real::from(LogLinear::ln_u64(2)));
        assert_eq!(x.sub(&x), Real::zero());
        assert_eq!(x.compare(&x).unwrap(), Ordering::Equal);
    }

    #[test]
    fn mixed_comparisons() {
        // sqrt(2) vs log 4
        let s = Real::pow(&q(2, 1), &q(1, 2)).unwrap();
        let l4 = Real::from(LogLinear::ln_u64(4));
        assert_eq!(s.compare(&l4).unwrap(), Ordering::Greater);
        // 17 log 2 / sqrt(17) = sqrt(17) log 2 vs log 17
        let t = Real::from(LogLinear::ln_u64(2).scale(&q(17, 1)))
            .div(&Real::pow(&q(17, 1), &q(1, 2)).unwrap())
            .unwrap();
        assert!((t.approx() - 17f64.sqrt() * 2f64.ln()).abs() < 1e-12);
        assert_eq!(t.compare(&Real::from(LogLinear::ln_u64(17))).unwrap(), Ordering::Greater);
    }

    #[test]
    fn nested_logs() {
        // ln(ln 16) vs 1: ln 16 = 2.77 > e
        let x = Real::from(LogLinear::ln_u64(16)).ln().unwrap();
        assert_eq!(x.compare(&Real::one()).unwrap(), Ordering::Greater);
        let y = Real::from(LogLinear::ln_u64(15)).ln().unwrap();
        assert_eq!(y.compare(&Real::one()).unwrap(), Ordering::Less);
    }
}
