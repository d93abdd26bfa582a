//! Rational linear combinations of logarithms of primes.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::interval::{ln_int, Interval};
use super::primes::factorize;
use crate::error::{Error, Result};
use crate::json;

/// `Σ c_p · log p` over finitely many primes `p` with nonzero rational `c_p`.
///
/// Logarithms of distinct primes are linearly independent over the rationals,
/// so two values are equal exactly when their term maps agree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LogLinear {
    terms: BTreeMap<BigUint, BigRational>,
}

impl LogLinear {
    pub fn zero() -> Self {
        LogLinear::default()
    }

    /// `coeff · log(base)`, factoring a composite base into primes.
    pub fn from_coeff_base(coeff: &BigRational, base: &BigInt) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::InvalidBase(base.to_string()));
        }
        let mut out = LogLinear::zero();
        if coeff.is_zero() || base.is_one() {
            return Ok(out);
        }
        for (p, e) in factorize(base.magnitude()) {
            out.add_term(p, coeff * BigRational::from_integer(BigInt::from(e)));
        }
        Ok(out)
    }

    /// `log n` for a positive integer.
    pub fn ln_of(n: &BigUint) -> Self {
        let base = BigInt::from_biguint(Sign::Plus, n.clone());
        LogLinear::from_coeff_base(&BigRational::one(), &base).expect("positive base")
    }

    pub fn ln_u64(n: u64) -> Self {
        LogLinear::ln_of(&BigUint::from(n))
    }

    /// `log |r|` for a nonzero rational.
    pub fn ln_rational(r: &BigRational) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidBase("0".into()));
        }
        Ok(&LogLinear::ln_of(r.numer().magnitude()) - &LogLinear::ln_of(r.denom().magnitude()))
    }

    /// Build from an explicit prime-to-coefficient map. Keys must be prime.
    pub fn from_terms(terms: impl IntoIterator<Item = (BigUint, BigRational)>) -> Self {
        let mut out = LogLinear::zero();
        for (p, c) in terms {
            out.add_term(p, c);
        }
        out
    }

    fn add_term(&mut self, p: BigUint, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(p.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<BigUint, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, p: &BigUint) -> BigRational {
        self.terms.get(p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return LogLinear::zero();
        }
        LogLinear {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), c * k)).collect(),
        }
    }

    /// Terms with positive coefficients only.
    pub fn positive_part(&self) -> Self {
        LogLinear {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.is_positive())
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }

    /// Negated terms with negative coefficients, so the result is `>= 0`.
    pub fn negative_part(&self) -> Self {
        LogLinear {
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.is_negative())
                .map(|(p, c)| (p.clone(), -c))
                .collect(),
        }
    }

    /// If `self = k · other` for a rational `k`, return `k`.
    pub fn ratio_to(&self, other: &LogLinear) -> Option<BigRational> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.terms.len() != other.terms.len() {
            return None;
        }
        let (p0, c0) = other.terms.iter().next().unwrap();
        let k = self.terms.get(p0)? / c0;
        if other.scale(&k) == *self {
            Some(k)
        } else {
            None
        }
    }

    /// Encloses the value at `prec` fractional bits.
    pub fn enclose(&self, prec: u32) -> Interval {
        let guard = 8 + 2 * (self.terms.len() as u32).max(1).ilog2() + 2;
        let work = prec + guard;
        let mut acc = Interval::point_int(&BigInt::zero(), work);
        for (p, c) in &self.terms {
            let lp = ln_int(p, work + c.numer().bits() as u32);
            let scaled = lp.scale_int(c.numer()).div_pos_int(c.denom());
            acc = acc.add(&scaled.rescale(work));
        }
        acc.rescale(prec)
    }

    pub fn approx(&self) -> f64 {
        self.terms
            .iter()
            .map(|(p, c)| c.to_f64().unwrap_or(f64::NAN) * ln_f64(p))
            .fold(0.0, |a, x| a + x)
    }

    /// Certified sign.
    pub fn signum(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        if self.terms.values().all(|c| c.is_positive()) {
            return Ordering::Greater;
        }
        if self.terms.values().all(|c| c.is_negative()) {
            return Ordering::Less;
        }
        let mut prec = 64;
        loop {
            if let Some(s) = self.enclose(prec).sign() {
                return s;
            }
            prec *= 2;
        }
    }

    /// Certified comparison; refines precision until the difference is signed.
    pub fn compare(&self, other: &LogLinear) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum()
    }
}

pub(crate) fn ln_f64(n: &BigUint) -> f64 {
    match n.to_f64() {
        Some(f) if f.is_finite() => f.ln(),
        _ => {
            let drop = n.bits() - 64;
            (n >> drop).to_f64().unwrap().ln() + drop as f64 * std::f64::consts::LN_2
        }
    }
}

impl PartialOrd for LogLinear {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogLinear {
    fn cmp(&self, other: &Self) -> Ordering {
        self.compare(other)
    }
}

impl Add for &LogLinear {
    type Output = LogLinear;
    fn add(self, rhs: &LogLinear) -> LogLinear {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }
}

impl Add for LogLinear {
    type Output = LogLinear;
    fn add(self, rhs: LogLinear) -> LogLinear {
        &self + &rhs
    }
}

impl Sub for &LogLinear {
    type Output = LogLinear;
    fn sub(self, rhs: &LogLinear) -> LogLinear {
        self + &(-rhs)
    }
}

impl Sub for LogLinear {
    type Output = LogLinear;
    fn sub(self, rhs: LogLinear) -> LogLinear {
        &self - &rhs
    }
}

impl Neg for &LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        self.scale(&-BigRational::one())
    }
}

impl Neg for LogLinear {
    type Output = LogLinear;
    fn neg(self) -> LogLinear {
        -&self
    }
}

impl Mul<&BigRational> for &LogLinear {
    type Output = LogLinear;
    fn mul(self, k: &BigRational) -> LogLinear {
        self.scale(k)
    }
}

impl std::iter::Sum for LogLinear {
    fn sum<I: Iterator<Item = LogLinear>>(iter: I) -> Self {
        iter.fold(LogLinear::zero(), |a, b| &a + &b)
    }
}

impl fmt::Display for LogLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (p, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let num = c.numer().abs();
            if num.is_one() {
                write!(f, "log({p})")?;
            } else {
                write!(f, "{num}*log({p})")?;
            }
            if !c.denom().is_one() {
                write!(f, "/{}", c.denom())?;
            }
        }
        Ok(())
    }
}

/// Parses sums of terms `log(n)`, `r*log(n)`, `log(n)/k` and `r*log(n)/k`,
/// the same shape [`fmt::Display`] produces.
impl FromStr for LogLinear {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidInput(format!("cannot parse {s:?} as a log-linear form: {why}"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad("empty"));
        }
        if compact == "0" {
            return Ok(LogLinear::zero());
        }
        // split into signed terms at top-level + and -
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut neg = false;
        let mut cur = String::new();
        let mut depth = 0i32;
        for ch in compact.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            let after_operator = matches!(cur.chars().last(), Some('*') | Some('/'));
            if depth == 0 && (ch == '+' || ch == '-') && !after_operator {
                if !cur.is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                } else if !terms.is_empty() || neg {
                    return Err(bad("dangling operator"));
                }
                neg = ch == '-';
                continue;
            }
            cur.push(ch);
        }
        if depth != 0 {
            return Err(bad("unbalanced parentheses"));
        }
        if cur.is_empty() {
            return Err(bad("dangling operator"));
        }
        terms.push((neg, cur));

        let mut out = LogLinear::zero();
        for (neg, t) in terms {
            let open = t.find("log(").ok_or_else(|| bad("expected log(<int>)"))?;
            let close = t[open..].find(')').map(|k| open + k).ok_or_else(|| bad("missing )"))?;
            let mut coeff = match &t[..open] {
                "" => BigRational::one(),
                pre => {
                    let pre = pre.strip_suffix('*').ok_or_else(|| bad("expected * before log"))?;
                    json::parse_rational(pre).map_err(|e| bad(&e))?
                }
            };
            let base: BigInt = t[open + 4..close].parse().map_err(|_| bad("base must be an integer"))?;
            match &t[close + 1..] {
                "" => {}
                post => {
                    let den = post.strip_prefix('/').ok_or_else(|| bad("unexpected text after log(...)"))?;
                    let den: BigInt = den.parse().map_err(|_| bad("bad divisor"))?;
                    if den.is_zero() {
                        return Err(bad("division by zero"));
                    }
                    coeff /= BigRational::from_integer(den);
                }
            }
            if neg {
                coeff = -coeff;
            }
            out = &out + &LogLinear::from_coeff_base(&coeff, &base)?;
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct LogLinearDto {
    terms: Vec<(serde_json::Value, String)>,
    #[serde(default)]
    approx: Option<f64>,
}

impl Serialize for LogLinear {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LogLinearDto {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| (json::biguint_value(p), json::rational_string(c)))
                .collect(),
            approx: Some(self.approx()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogLinear {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = LogLinearDto::deserialize(d)?;
        let mut out = LogLinear::zero();
        for (p, c) in dto.terms {
            let p = json::biguint_from_value(&p).map_err(D::Error::custom)?;
            let c = json::parse_rational(&c).map_err(D::Error::custom)?;
            // composite keys are accepted and canonicalized
            let t = LogLinear::from_coeff_base(&c, &BigInt::from(p)).map_err(D::Error::custom)?;
            out = &out + &t;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parse_forms() {
        let two: LogLinear = "log(2)".parse().unwrap();
        assert_eq!(two, LogLinear::ln_u64(2));
        let x: LogLinear = "3/2*log(5) - log(7)/4 + log(8)".parse().unwrap();
        let want = &(&LogLinear::ln_u64(5).scale(&q(3, 2)) - &LogLinear::ln_u64(7).scale(&q(1, 4)))
            + &LogLinear::ln_u64(2).scale(&q(3, 1));
        assert_eq!(x, want);
        assert_eq!(x.to_string().parse::<LogLinear>().unwrap(), x);
        assert_eq!("-2*log(3)".parse::<LogLinear>().unwrap(), LogLinear::ln_u64(3).scale(&q(-2, 1)));
        for bad in ["", "log 2", "log(2", "2log(3)", "log(0)", "log(2)+", "log(2)/0"] {
            assert!(bad.parse::<LogLinear>().is_err(), "{bad}");
        }
    }

    #[test]
    fn canonical_forms() {
        let a = LogLinear::from_coeff_base(&q(1, 3), &BigInt::from(8)).unwrap();
        assert_eq!(a, LogLinear::ln_u64(2));
        assert!(LogLinear::from_coeff_base(&q(0, 1), &BigInt::from(5)).unwrap().is_zero());
        assert!(LogLinear::from_coeff_base(&q(1, 1), &BigInt::from(0)).is_err());
        assert!((LogLinear::ln_u64(2).approx() - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn comparisons() {
        let l2 = LogLinear::ln_u64(2);
        let l3 = LogLinear::ln_u64(3);
        assert_eq!(l2.compare(&l3), Ordering::Less);
        let half_l4 = LogLinear::ln_u64(4).scale(&q(1, 2));
        assert_eq!(half_l4.compare(&l2), Ordering::Equal);
        assert_eq!(l3.compare(&l2.scale(&q(3, 2))), Ordering::Greater);
    }

    #[test]
    fn near_ties_resolve() {
        // 3^12 = 531441 vs 2^19 = 524288
        let a = LogLinear::ln_u64(3).scale(&q(12, 1));
        let b = LogLinear::ln_u64(2).scale(&q(19, 1));
        assert_eq!(a.compare(&b), Ordering::Greater);
        // log(2^64 + 1) vs 64 log 2
        let big = (BigUint::one() << 64) + 1u32;
        let c = LogLinear::ln_of(&big);
        let d = LogLinear::ln_u64(2).scale(&q(64, 1));
        assert_eq!(c.compare(&d), Ordering::Greater);
    }

    #[test]
    fn display_forms() {
        assert_eq!(LogLinear::ln_u64(7).scale(&q(1, 2)).to_string(), "log(7)/2");
        assert_eq!(LogLinear::ln_u64(2).scale(&q(3, 2)).to_string(), "3*log(2)/2");
        assert_eq!((-LogLinear::ln_u64(3)).to_string(), "-log(3)");
        let mix = &LogLinear::ln_u64(5) - &LogLinear::ln_u64(7);
        assert_eq!(mix.to_string(), "log(5) - log(7)");
    }

    #[test]
    fn json_round_trip() {
        let v = &LogLinear::ln_u64(7).scale(&q(1, 2)) - &LogLinear::ln_u64(2);
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("[2,\"-1/1\"]") || s.contains("[2,\"-1\"]"), "{s}");
        let back: LogLinear = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
