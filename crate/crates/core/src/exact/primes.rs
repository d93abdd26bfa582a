//! Primality, factorization and prime search in windows.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::loglinear::LogLinear;
use super::real::Real;
use crate::error::Result;

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Beyond this bound the fixed witness set is no longer known to be
/// sufficient and random witnesses are used.
fn deterministic_limit() -> BigUint {
    "3317044064679887385961981".parse().unwrap()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &WITNESSES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn mr_round(n: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let one = BigUint::one();
    let nm1 = n - &one;
    let mut x = a.modpow(d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

/// Miller–Rabin; deterministic below about 3.3e24, probabilistic above.
pub fn is_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for &p in &WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let nm1 = n - 1u32;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    for &a in &WITNESSES {
        if !mr_round(n, &d, s, &BigUint::from(a)) {
            return false;
        }
    }
    if *n < deterministic_limit() {
        return true;
    }
    // seeded from n so repeated calls agree
    let seed = n.to_u64_digits().iter().fold(0x9e37_79b9_7f4a_7c15u64, |h, &w| {
        h.rotate_left(17) ^ w.wrapping_mul(0xff51_afd7_ed55_8ccd)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two = BigUint::from(2u32);
    for _ in 0..64 {
        let a = rng.gen_biguint_range(&two, &nm1);
        if !mr_round(n, &d, s, &a) {
            return false;
        }
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn factor_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(&n);
    let rest = &n / &d;
    factor_into(d, out);
    factor_into(rest, out);
}

/// Prime factorization as ascending `(prime, exponent)` pairs.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut n = n.clone();
    let mut primes = Vec::new();
    for p in 2u32..1000 {
        if (&n % p).is_zero() {
            while (&n % p).is_zero() {
                n /= p;
                primes.push(BigUint::from(p));
            }
        }
        if n.is_one() {
            break;
        }
    }
    factor_into(n, &mut primes);
    primes.sort();
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// One end of a prime search window.
#[derive(Clone, Debug)]
pub enum Bound {
    Int { value: BigUint, inclusive: bool },
    /// The real number `e^x`.
    Exp { x: Real, inclusive: bool },
}

impl Bound {
    pub fn int(value: impl Into<BigUint>, inclusive: bool) -> Self {
        Bound::Int { value: value.into(), inclusive }
    }

    pub fn exp(x: impl Into<Real>, inclusive: bool) -> Self {
        Bound::Exp { x: x.into(), inclusive }
    }
}

/// Does `n` satisfy `n >= e^x` (or `n > e^x` when exclusive)?
fn above_exp(n: &BigUint, x: &Real, inclusive: bool) -> Result<bool> {
    if n.is_zero() {
        return Ok(false);
    }
    let ord = Real::from(LogLinear::ln_of(n)).compare(x)?;
    Ok(if inclusive { ord.is_ge() } else { ord.is_gt() })
}

fn below_exp(n: &BigUint, x: &Real, inclusive: bool) -> Result<bool> {
    if n.is_zero() {
        return Ok(true);
    }
    let ord = Real::from(LogLinear::ln_of(n)).compare(x)?;
    Ok(if inclusive { ord.is_le() } else { ord.is_lt() })
}

/// Least integer `n >= 1` with `pred(n)` for a monotone predicate, searching
/// upward from a floating guess.
fn least_satisfying(
    guess: &BigUint,
    pred: &dyn Fn(&BigUint) -> Result<bool>,
) -> Result<BigUint> {
    let one = BigUint::one();
    let mut lo;
    let mut hi = guess.max(&one).clone();
    if pred(&hi)? {
        // shrink downward
        let mut step = BigUint::one();
        loop {
            if step >= hi {
                lo = one.clone();
                break;
            }
            let cand = &hi - &step;
            if pred(&cand)? {
                hi = cand;
                step <<= 1;
            } else {
                lo = cand + 1u32;
                break;
            }
        }
        if pred(&lo)? {
            return Ok(lo);
        }
    } else {
        let mut step = BigUint::one();
        loop {
            let cand = &hi + &step;
            if pred(&cand)? {
                lo = hi + 1u32;
                hi = cand;
                break;
            }
            hi = cand;
            step <<= 1;
        }
    }
    // pred(hi) holds, pred(lo - 1) fails
    while lo < hi {
        let mid: BigUint = (&lo + &hi) >> 1;
        if pred(&mid)? {
            hi = mid;
        } else {
            lo = mid + 1u32;
        }
    }
    Ok(hi)
}

fn guess_from_f64(x: f64) -> BigUint {
    let v = x.exp();
    if v.is_finite() && v < 1e300 {
        BigUint::from_f64(v.max(1.0)).unwrap_or_else(BigUint::one)
    } else {
        // e^x = 2^(x / ln 2)
        let bits = (x / std::f64::consts::LN_2).floor() as u64;
        BigUint::one() << bits
    }
}

/// Least integer satisfying the lower bound.
pub fn lower_integer(b: &Bound) -> Result<BigUint> {
    match b {
        Bound::Int { value, inclusive } => Ok(if *inclusive { value.clone() } else { value + 1u32 }),
        Bound::Exp { x, inclusive } => {
            let g = guess_from_f64(x.approx());
            least_satisfying(&g, &|n| above_exp(n, x, *inclusive))
        }
    }
}

/// Greatest integer satisfying the upper bound, or `None` when it is below 1.
pub fn upper_integer(b: &Bound) -> Result<Option<BigUint>> {
    match b {
        Bound::Int { value, inclusive } => {
            if *inclusive {
                Ok(Some(value.clone()))
            } else if value.is_zero() {
                Ok(None)
            } else {
                Ok(Some(value - 1u32))
            }
        }
        Bound::Exp { x, inclusive } => {
            let g = guess_from_f64(x.approx());
            let first_out = least_satisfying(&g, &|n| Ok(!below_exp(n, x, *inclusive)?))?;
            if first_out.is_one() {
                Ok(None)
            } else {
                Ok(Some(first_out - 1u32))
            }
        }
    }
}

const CHUNK: u64 = 2048;

/// Least prime in the window, or `None` if the window holds no prime.
///
/// Candidates are tested in parallel chunks; the answer is always the least
/// prime regardless of scheduling.
pub fn smallest_prime_in(lo: &Bound, hi: &Bound) -> Result<Option<BigUint>> {
    use rayon::prelude::*;
    let start = lower_integer(lo)?.max(BigUint::from(2u32));
    let end = match upper_integer(hi)? {
        Some(e) => e,
        None => return Ok(None),
    };
    let mut base = start;
    while base <= end {
        let span = (&end - &base + 1u32).to_u64().unwrap_or(u64::MAX).min(CHUNK);
        let found = (0..span)
            .into_par_iter()
            .filter_map(|k| {
                let n = &base + k;
                if is_prime(&n) {
                    Some(k)
                } else {
                    None
                }
            })
            .min();
        if let Some(k) = found {
            return Ok(Some(base + k));
        }
        base += span;
    }
    Ok(None)
}

/// Least prime `p >= n`.
pub fn next_prime(n: &BigUint) -> BigUint {
    let mut c = n.max(&BigUint::from(2u32)).clone();
    if c > BigUint::from(2u32) && c.is_even() {
        c += 1u32;
    }
    loop {
        if is_prime(&c) {
            return c;
        }
        c += if c == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_primes_match_trial_division() {
        for n in 0..5000u64 {
            assert_eq!(is_prime(&BigUint::from(n)), trial(n), "n={n}");
        }
    }

    #[test]
    fn known_values() {
        assert!(is_prime(&BigUint::from(2u32)));
        assert!(!is_prime(&BigUint::from(561u32)));
        assert!(is_prime(&BigUint::from(1_000_000_007u64)));
        // 2^89 - 1 is a Mersenne prime, 2^67 - 1 is not
        assert!(is_prime(&((BigUint::one() << 89) - 1u32)));
        assert!(!is_prime(&((BigUint::one() << 67) - 1u32)));
        // 2^127 - 1 is past the deterministic limit
        assert!(is_prime(&((BigUint::one() << 127) - 1u32)));
    }

    #[test]
    fn factorization_round_trip() {
        let n: BigUint = BigUint::from(2u32).pow(5) * 3u32 * 1_000_000_007u64 * 1_000_000_009u64;
        let f = factorize(&n);
        let back = f.iter().fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        assert_eq!(back, n);
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn window_examples() {
        let s = |a: u32, ai: bool, b: u32, bi: bool| {
            smallest_prime_in(&Bound::int(a, ai), &Bound::int(b, bi)).unwrap()
        };
        assert_eq!(s(4, true, 8, true), Some(BigUint::from(5u32)));
        assert_eq!(s(24, true, 28, true), None);
        assert_eq!(s(5, false, 10, false), Some(BigUint::from(7u32)));
    }

    #[test]
    fn exponential_window() {
        // [e^(log 2 + log 3), 2 e^(...)] = [6, 12] -> 7
        let x = LogLinear::ln_of(&BigUint::from(6u32));
        let two_x = &x + &LogLinear::ln_of(&BigUint::from(2u32));
        let p = smallest_prime_in(&Bound::exp(x, true), &Bound::exp(two_x, true)).unwrap();
        assert_eq!(p, Some(BigUint::from(7u32)));
    }
}
