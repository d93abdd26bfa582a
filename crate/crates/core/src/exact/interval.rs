//! Outward-rounded dyadic intervals.
//!
//! An [`Interval`] at precision `prec` is the closed interval
//! `[lo / 2^prec, hi / 2^prec]` with integer endpoints. Every operation rounds
//! its endpoints away from the true result, so the enclosed set always
//! contains the exact value.

use std::sync::RwLock;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigInt,
    hi: BigInt,
    prec: u32,
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

fn shr_floor(a: &BigInt, bits: u32) -> BigInt {
    // BigInt >> rounds toward negative infinity
    a >> bits
}

fn shr_ceil(a: &BigInt, bits: u32) -> BigInt {
    -((-a) >> bits)
}

impl Interval {
    pub fn new(lo: BigInt, hi: BigInt, prec: u32) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi, prec }
    }

    pub fn point_int(n: &BigInt, prec: u32) -> Self {
        let v = n << prec;
        Interval::new(v.clone(), v, prec)
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let num = r.numer() << prec;
        let den = r.denom();
        Interval::new(floor_div(&num, den), ceil_div(&num, den), prec)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn lo_raw(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_raw(&self) -> &BigInt {
        &self.hi
    }

    /// Sign of every point in the interval, if it is the same for all of them.
    pub fn sign(&self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        if self.lo.is_positive() {
            Some(Greater)
        } else if self.hi.is_negative() {
            Some(Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Equal)
        } else {
            None
        }
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn midpoint_f64(&self) -> f64 {
        let sum: BigInt = &self.lo + &self.hi;
        dyadic_to_f64(&sum, self.prec + 1)
    }

    pub fn lo_f64(&self) -> f64 {
        dyadic_to_f64(&self.lo, self.prec)
    }

    pub fn hi_f64(&self) -> f64 {
        dyadic_to_f64(&self.hi, self.prec)
    }

    pub fn width_f64(&self) -> f64 {
        dyadic_to_f64(&(&self.hi - &self.lo), self.prec)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        debug_assert_eq!(self.prec, other.prec);
        Interval::new(&self.lo + &other.lo, &self.hi + &other.hi, self.prec)
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        debug_assert_eq!(self.prec, other.prec);
        Interval::new(&self.lo - &other.hi, &self.hi - &other.lo, self.prec)
    }

    pub fn neg(&self) -> Interval {
        Interval::new(-&self.hi, -&self.lo, self.prec)
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        debug_assert_eq!(self.prec, other.prec);
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let min = cands.iter().min().unwrap();
        let max = cands.iter().max().unwrap();
        Interval::new(shr_floor(min, self.prec), shr_ceil(max, self.prec), self.prec)
    }

    pub fn scale_int(&self, k: &BigInt) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval::new(a, b, self.prec)
        } else {
            Interval::new(b, a, self.prec)
        }
    }

    /// Reciprocal; `None` when the interval touches zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        let one = BigInt::one() << (2 * self.prec);
        Some(Interval::new(
            floor_div(&one, &self.hi),
            ceil_div(&one, &self.lo),
            self.prec,
        ))
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval::new(
            (&self.lo).max(&other.lo).clone(),
            (&self.hi).max(&other.hi).clone(),
            self.prec,
        )
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval::new(
            (&self.lo).min(&other.lo).clone(),
            (&self.hi).min(&other.hi).clone(),
            self.prec,
        )
    }

    /// Natural logarithm; `None` unless the interval is strictly positive.
    pub fn ln(&self) -> Option<Interval> {
        if !self.is_strictly_positive() {
            return None;
        }
        // ln(m / 2^prec) = ln(m) - prec ln 2
        let lo = ln_dyadic(&self.lo, self.prec, self.prec);
        let hi = ln_dyadic(&self.hi, self.prec, self.prec);
        Some(Interval::new(lo.lo, hi.hi, self.prec))
    }

    /// Encloses `r^(exp)` for a positive rational base and rational exponent.
    pub fn rational_power(base: &BigRational, exp: &BigRational, prec: u32) -> Interval {
        assert!(base.is_positive());
        let num_e = exp.numer();
        let den_e = exp
            .denom()
            .to_u32()
            .expect("exponent denominator must fit in u32");
        let b = if num_e.is_negative() { base.recip() } else { base.clone() };
        let a = num_e
            .abs()
            .to_u32()
            .expect("exponent numerator must fit in u32");
        let x = num_traits::pow::Pow::pow(&b, a);
        // root of x * 2^(prec * den) gives value * 2^prec
        let shift = prec as usize * den_e as usize;
        let scaled_num: BigInt = x.numer() << shift;
        let lo_rad = floor_div(&scaled_num, x.denom());
        let hi_rad = ceil_div(&scaled_num, x.denom());
        let lo = nth_root_floor(&lo_rad, den_e);
        let hi_floor = nth_root_floor(&hi_rad, den_e);
        let hi = if num_traits::pow::Pow::pow(&hi_floor, den_e) == hi_rad {
            hi_floor
        } else {
            hi_floor + 1
        };
        Interval::new(lo, hi, prec)
    }
}

impl Interval {
    /// Divide by a positive integer with outward rounding.
    pub fn div_pos_int(&self, d: &BigInt) -> Interval {
        let lo = self.lo.div_floor(d);
        let hi = -((-&self.hi).div_floor(d));
        Interval::new(lo, hi, self.prec)
    }

    /// Change precision with outward rounding.
    pub fn rescale(&self, prec: u32) -> Interval {
        let p = self.prec;
        if prec >= p {
            let s = prec - p;
            Interval::new(&self.lo << s, &self.hi << s, prec)
        } else {
            let s = p - prec;
            Interval::new(&self.lo >> s, -((-&self.hi) >> s), prec)
        }
    }
}

fn nth_root_floor(x: &BigInt, n: u32) -> BigInt {
    if n == 1 {
        return x.clone();
    }
    x.nth_root(n)
}

fn dyadic_to_f64(m: &BigInt, prec: u32) -> f64 {
    let drop = m.bits().saturating_sub(60);
    let top = (m >> drop).to_f64().unwrap_or(f64::NAN);
    let mut e = drop as i64 - prec as i64;
    let mut out = top;
    // split the scaling so intermediate powers stay finite
    while e != 0 {
        let step = e.clamp(-1000, 1000);
        out *= 2f64.powi(step as i32);
        e -= step;
    }
    out
}

/// Fixed-point `atanh(a/b)` at `work` fractional bits for `0 <= a/b <= 1/3`.
///
/// Returns `(v, err)` with `|atanh(a/b) * 2^work - v| <= err`.
fn atanh_fixed(a: &BigUint, b: &BigUint, work: u32) -> (BigInt, BigInt) {
    let a = BigInt::from(a.clone());
    let b = BigInt::from(b.clone());
    let y = floor_div(&(a << work), &b);
    if y.is_zero() {
        return (BigInt::zero(), BigInt::from(2));
    }
    let y2 = shr_floor(&(&y * &y), work);
    let mut term = y.clone();
    let mut sum = y;
    let mut k: u64 = 1;
    loop {
        term = shr_floor(&(&term * &y2), work);
        if term.is_zero() {
            break;
        }
        sum += &term / BigInt::from(2 * k + 1);
        k += 1;
    }
    (sum, BigInt::from(8 * (k + 2)))
}

struct Ln2Cache {
    work: u32,
    value: BigInt,
    err: BigInt,
}

static LN2: RwLock<Option<Ln2Cache>> = RwLock::new(None);

/// `ln 2` at `work` fractional bits with its error bound in ulps.
fn ln2_fixed(work: u32) -> (BigInt, BigInt) {
    if let Some(c) = LN2.read().unwrap().as_ref() {
        if c.work >= work {
            let drop = c.work - work;
            let v = shr_floor(&c.value, drop);
            let e = shr_ceil(&c.err, drop) + 1;
            return (v, e);
        }
    }
    let target = work.max(256);
    let (v, e) = atanh_fixed(&BigUint::one(), &BigUint::from(3u32), target);
    let v: BigInt = v * 2;
    let e: BigInt = e * 2;
    *LN2.write().unwrap() = Some(Ln2Cache {
        work: target,
        value: v.clone(),
        err: e.clone(),
    });
    let drop = target - work;
    (shr_floor(&v, drop), shr_ceil(&e, drop) + 1)
}

/// Encloses `ln(m) - shift * ln 2` at `prec` fractional bits, `m > 0`.
pub(crate) fn ln_dyadic(m: &BigInt, shift: u32, prec: u32) -> Interval {
    assert!(m.is_positive());
    let mu = m.magnitude();
    let k = mu.bits() - 1;
    let pow = BigUint::one() << k;
    let a = mu - &pow;
    let b = mu + &pow;
    let k_net = BigInt::from(k) - BigInt::from(shift);
    let kbits = (k_net.abs().bits() as u32) + 1;
    let work = prec + 40 + kbits;
    let (at, at_err) = atanh_fixed(&a, &b, work);
    let (l2, l2_err) = ln2_fixed(work);
    let val = at * 2 + &l2 * &k_net;
    let err = at_err * 2 + l2_err * k_net.abs() + 2;
    let drop = work - prec;
    Interval::new(shr_floor(&(&val - &err), drop), shr_ceil(&(&val + &err), drop), prec)
}

/// Encloses `ln(n)` for a positive integer.
pub fn ln_int(n: &BigUint, prec: u32) -> Interval {
    assert!(!n.is_zero());
    if n.is_one() {
        return Interval::point_int(&BigInt::zero(), prec);
    }
    ln_dyadic(&BigInt::from_biguint(Sign::Plus, n.clone()), 0, prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln2_encloses_reference() {
        let iv = ln_int(&BigUint::from(2u32), 80);
        assert!(iv.lo_f64() <= std::f64::consts::LN_2 + 1e-15);
        assert!(iv.hi_f64() >= std::f64::consts::LN_2 - 1e-15);
        assert!(iv.width_f64() < 1e-20);
    }

    #[test]
    fn ln_of_large_integers() {
        for n in [3u64, 10, 1_000_000_007, u64::MAX] {
            let iv = ln_int(&BigUint::from(n), 64);
            let f = (n as f64).ln();
            assert!((iv.midpoint_f64() - f).abs() < 1e-12 * f.max(1.0), "n={n}");
        }
    }

    #[test]
    fn rational_power_brackets_sqrt2() {
        let two = BigRational::from_integer(2.into());
        let half = BigRational::new(1.into(), 2.into());
        let iv = Interval::rational_power(&two, &half, 60);
        assert!(iv.lo_f64() <= 2f64.sqrt() && iv.hi_f64() >= 2f64.sqrt() - 1e-15);
        let four = BigRational::from_integer(4.into());
        let exact = Interval::rational_power(&four, &half, 60);
        assert_eq!(exact.sign(), Some(std::cmp::Ordering::Greater));
        assert!((exact.midpoint_f64() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn reciprocal_rejects_zero() {
        let iv = Interval::new(BigInt::from(-1), BigInt::from(1), 10);
        assert!(iv.recip().is_none());
    }
}
