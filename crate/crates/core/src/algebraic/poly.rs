//! Integer polynomials: arithmetic, gcd, squarefree decomposition.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Polynomial with integer coefficients, stored lowest degree first with no
/// trailing zeros. The zero polynomial has an empty coefficient list.
/// JSON form: coefficient list, each an integer or a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(v) => serde_json::Value::from(v),
                None => serde_json::Value::from(c.to_string()),
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        let coeffs = v
            .iter()
            .map(|x| match x {
                serde_json::Value::Number(n) => {
                    n.as_i64().map(BigInt::from).ok_or_else(|| D::Error::custom(format!("bad coefficient {n}")))
                }
                serde_json::Value::String(s) => {
                    s.parse().map_err(|_| D::Error::custom(format!("bad coefficient {s:?}")))
                }
                other => Err(D::Error::custom(format!("bad coefficient {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntPolynomial::new(coeffs))
    }
}

type RatPoly = Vec<BigRational>;

fn trim_rat(mut p: RatPoly) -> RatPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn rat_monic(p: RatPoly) -> RatPoly {
    let p = trim_rat(p);
    match p.last() {
        Some(l) if !l.is_one() => {
            let l = l.clone();
            p.into_iter().map(|c| c / &l).collect()
        }
        _ => p,
    }
}

/// Quotient and remainder over the rationals.
fn rat_divmod(a: &RatPoly, b: &RatPoly) -> (RatPoly, RatPoly) {
    let b = trim_rat(b.clone());
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = trim_rat(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / &lb;
        for (i, c) in b.iter().enumerate() {
            r[i + shift] -= &f * c;
        }
        q[shift] = f;
        r = trim_rat(r);
    }
    (trim_rat(q), r)
}

fn rat_gcd(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let mut x = trim_rat(a.clone());
    let mut y = trim_rat(b.clone());
    while !y.is_empty() {
        let (_, r) = rat_divmod(&x, &y);
        x = y;
        y = r;
    }
    rat_monic(x)
}

fn rat_derivative(p: &RatPoly) -> RatPoly {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

fn rat_sub(a: &RatPoly, b: &RatPoly) -> RatPoly {
    let n = a.len().max(b.len());
    let z = BigRational::zero();
    trim_rat(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Polynomial from rational coefficients, scaled to a primitive integer one.
    pub fn from_rational(coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints = coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        IntPolynomial::new(ints).primitive()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divide by the content and make the leading coefficient positive.
    pub fn primitive(&self) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPolynomial::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    pub fn derivative(&self) -> IntPolynomial {
        IntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::new(Vec::new());
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Coefficients as `f64`, if all are finite.
    pub fn to_f64(&self) -> Option<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().filter(|v| v.is_finite()))
            .collect()
    }

    fn to_rat(&self) -> RatPoly {
        self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect()
    }

    /// Primitive gcd with positive leading coefficient.
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        IntPolynomial::from_rational(&rat_gcd(&self.to_rat(), &other.to_rat()))
    }

    /// Quotient over the rationals, made primitive.
    pub fn div_primitive(&self, other: &IntPolynomial) -> IntPolynomial {
        let (q, _) = rat_divmod(&self.to_rat(), &other.to_rat());
        IntPolynomial::from_rational(&q)
    }

    /// Remainder over the rationals is zero.
    pub fn divides(&self, other: &IntPolynomial) -> bool {
        let (_, r) = rat_divmod(&other.to_rat(), &self.to_rat());
        r.is_empty()
    }

    /// Yun's squarefree decomposition: primitive factors `g_i` with
    /// multiplicities, so `f = content · ∏ g_i^(m_i)` up to sign.
    pub fn squarefree_decomposition(&self) -> Vec<(IntPolynomial, u32)> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let f = rat_monic(self.to_rat());
        let df = rat_derivative(&f);
        let a0 = rat_gcd(&f, &df);
        let mut b = rat_divmod(&f, &a0).0;
        let mut c = rat_divmod(&df, &a0).0;
        let mut d = rat_sub(&c, &rat_derivative(&b));
        let mut out = Vec::new();
        let mut i = 1;
        while b.len() > 1 {
            let a = rat_gcd(&b, &d);
            if a.len() > 1 {
                out.push((IntPolynomial::from_rational(&a), i));
            }
            b = rat_divmod(&b, &a).0;
            c = rat_divmod(&d, &a).0;
            d = rat_sub(&c, &rat_derivative(&b));
            i += 1;
        }
        out
    }

    pub fn is_squarefree(&self) -> bool {
        self.degree() == 0 || self.gcd(&self.derivative()).degree() == 0
    }

    /// Rational roots by the rational root test.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let p = self.primitive();
        if p.is_zero() {
            return Vec::new();
        }
        let mut roots = Vec::new();
        let mut q = p.clone();
        // strip zero roots
        let zeros = q.coeffs.iter().take_while(|c| c.is_zero()).count();
        if zeros > 0 {
            roots.push(BigRational::zero());
            q = IntPolynomial::new(q.coeffs[zeros..].to_vec());
        }
        if q.degree() == 0 {
            return roots;
        }
        let a0 = q.coeffs[0].abs();
        let an = q.leading().abs();
        let ds_num = small_divisors(&a0);
        let ds_den = small_divisors(&an);
        for n in &ds_num {
            for d in &ds_den {
                for s in [1i32, -1] {
                    let r = BigRational::new(n * BigInt::from(s), d.clone());
                    if !roots.contains(&r) && q.eval_rational(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        roots
    }
}

/// All positive divisors; intended for the small integers met in practice.
fn small_divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let mut out = Vec::new();
    if let Some(v) = n.to_u64() {
        let mut d = 1u64;
        while d * d <= v {
            if v % d == 0 {
                out.push(BigInt::from(d));
                if d * d != v {
                    out.push(BigInt::from(v / d));
                }
            }
            d += 1;
        }
        return out;
    }
    let mut acc = vec![BigInt::one()];
    for (p, e) in crate::exact::factorize(n.magnitude()) {
        let mut next = Vec::new();
        for a in &acc {
            let mut pw = BigInt::one();
            for _ in 0..=e {
                next.push(a * &pw);
                pw *= BigInt::from(p.clone());
            }
        }
        acc = next;
    }
    acc
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let a = c.abs();
            let coef = if a.is_one() && i > 0 { String::new() } else { a.to_string() };
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{coef}x")?,
                _ => write!(f, "{coef}x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn yun_recovers_multiplicities() {
        // (x - 1)^3 (x + 2)^2 (x^2 + 1)
        let a = IntPolynomial::from_i64(&[-1, 1]);
        let b = IntPolynomial::from_i64(&[2, 1]);
        let c = IntPolynomial::from_i64(&[1, 0, 1]);
        let f = a.mul(&a).mul(&a).mul(&b).mul(&b).mul(&c).mul(&IntPolynomial::from_i64(&[3]));
        let sq = f.squarefree_decomposition();
        assert_eq!(sq, vec![(c, 1), (b, 2), (a, 3)]);
    }

    #[test]
    fn rational_roots_found() {
        // (2x - 1)(x + 3)x
        let f = IntPolynomial::from_i64(&[-1, 2]).mul(&IntPolynomial::from_i64(&[3, 1])).mul(&IntPolynomial::from_i64(&[0, 1]));
        let mut r = f.rational_roots();
        r.sort();
        assert_eq!(r, vec![BigRational::from_integer((-3).into()), BigRational::zero(), BigRational::new(1.into(), 2.into())]);
    }

    #[test]
    fn display() {
        assert_eq!(IntPolynomial::from_i64(&[-1, -1, 1]).to_string(), "x^2 - x - 1");
        assert_eq!(IntPolynomial::from_i64(&[-5, 0, 7]).to_string(), "7x^2 - 5");
    }
}
