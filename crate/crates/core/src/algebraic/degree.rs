//! Degrees of radical monomials and of fields generated by real radicals.
//!
//! For a positive or negative real monomial with exponent denominator `D`,
//! `x^D - |a|^D` is irreducible (its constant term is not a `p`-th power for
//! any `p | D`), so the degree is `D`.
//!
//! With a nontrivial root of unity the degree is the orbit size of `a` under
//! the Galois group of `E = Q(ζ_n, ℓ^(1/e_ℓ))`. An automorphism is a pair
//! `(b, c)` with `ζ_n ↦ ζ_n^b` and `ℓ^(1/e_ℓ) ↦ ζ_(e_ℓ)^(c_ℓ) ℓ^(1/e_ℓ)`. The
//! only relations between the two parts come from square roots `√s` that lie
//! in `Q(ζ_n)`; each imposes `Σ_(ℓ | s) c_ℓ ≡ [χ_D(b) = -1] (mod 2)` with `D`
//! the discriminant of `Q(√s)`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::radical::RadicalMonomial;
use crate::error::{Error, Result};

/// Largest `φ(n)` enumerated by the general degree computation.
pub const MAX_UNITS: u64 = 4_000_000;

/// Largest number of primes with even root index in one monomial.
const MAX_EVEN_PRIMES: usize = 16;

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u64) -> i32 {
    assert!(n % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Discriminant of `Q(√s)` for squarefree `s > 1`.
fn quadratic_discriminant(s: u128) -> u128 {
    if s % 4 == 1 {
        s
    } else {
        4 * s
    }
}

/// `[Q(a) : Q]`.
pub fn monomial_degree(a: &RadicalMonomial) -> Result<BigUint> {
    let d = a.exponent_denominator();
    if a.is_real() {
        return Ok(d.magnitude().clone());
    }
    general_degree(a)
}

fn to_u64(n: &BigInt, what: &str) -> Result<u64> {
    n.to_u64()
        .ok_or_else(|| Error::BudgetExceeded(format!("{what} {n} exceeds the supported range")))
}

fn totient(n: u64) -> u64 {
    let mut m = n;
    let mut out = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            out -= out / p;
        }
        p += 1;
    }
    if m > 1 {
        out -= out / m;
    }
    out
}

struct Generator {
    /// Shift of the `ζ_n` exponent contributed by `c_ℓ = 1`.
    shift: u64,
    even: bool,
    prime: u128,
}

fn general_degree(a: &RadicalMonomial) -> Result<BigUint> {
    let mut n = BigInt::from(4).lcm(a.turn().denom());
    for c in a.log_abs().terms().values() {
        n = n.lcm(c.denom());
    }
    let n = to_u64(&n, "cyclotomic level")?;
    let units = totient(n);
    if units > MAX_UNITS {
        return Err(Error::BudgetExceeded(format!(
            "degree computation needs {units} automorphisms of Q(zeta_{n})"
        )));
    }
    let turn_n = (a.turn() * BigRational::from_integer(BigInt::from(n))).to_integer();
    let t_exp = turn_n.mod_floor(&BigInt::from(n)).to_u64().unwrap();

    let mut gens = Vec::new();
    for (p, c) in a.log_abs().terms() {
        let e = c.denom().to_u64().unwrap();
        if e == 1 {
            continue;
        }
        let u = c.numer().mod_floor(&BigInt::from(n)).to_u64().unwrap() as u128;
        let shift = (u * (n / e) as u128 % n as u128) as u64;
        let prime = p.to_u128().unwrap_or(u128::MAX);
        gens.push(Generator { shift, even: e % 2 == 0, prime });
    }
    let even: Vec<usize> = (0..gens.len()).filter(|&i| gens[i].even).collect();
    if even.len() > MAX_EVEN_PRIMES {
        return Err(Error::BudgetExceeded(format!(
            "{} primes with even root index",
            even.len()
        )));
    }

    // subsets S of the even primes with √(∏S) ∈ Q(ζ_n), reduced to echelon form
    let mut rows: Vec<(u32, u128)> = Vec::new();
    for mask in 1u32..(1u32 << even.len()) {
        let mut s: u128 = 1;
        let mut ok = true;
        for (k, &i) in even.iter().enumerate() {
            if mask >> k & 1 == 1 {
                match s.checked_mul(gens[i].prime) {
                    Some(v) if v <= n as u128 => s = v,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok && (n as u128).is_multiple_of(quadratic_discriminant(s)) {
            rows.push((mask, quadratic_discriminant(s)));
        }
    }
    let basis = echelon(&rows);

    // subgroup M = h Z/n generated by contributions of constraint-free c
    let pivots: Vec<u32> = basis.iter().map(|(m, _)| m.trailing_zeros()).collect();
    let mut h = n;
    for (i, g) in gens.iter().enumerate() {
        if !g.even {
            h = h.gcd(&g.shift);
            continue;
        }
        let k = even.iter().position(|&j| j == i).unwrap() as u32;
        h = h.gcd(&((2 * g.shift as u128 % n as u128) as u64));
        if pivots.contains(&k) {
            continue;
        }
        // kernel vector: this free column plus the pivots of rows that use it
        let mut v = g.shift as u128;
        for (row, &piv) in basis.iter().zip(&pivots) {
            if row.0 >> k & 1 == 1 {
                v += gens[even[piv as usize]].shift as u128;
            }
        }
        h = h.gcd(&((v % n as u128) as u64));
    }
    let h = if h == 0 { n } else { h };

    let mut seen = vec![false; h as usize];
    let mut count: u64 = 0;
    for b in 1..n {
        if b.gcd(&n) != 1 {
            continue;
        }
        let mut v = (t_exp as u128 * b as u128 % n as u128) as u64;
        for ((_, disc), &piv) in basis.iter().zip(&pivots) {
            if jacobi(*disc as i128, b) == -1 {
                v = ((v as u128 + gens[even[piv as usize]].shift as u128) % n as u128) as u64;
            }
        }
        let r = (v % h) as usize;
        if !seen[r] {
            seen[r] = true;
            count += 1;
        }
    }
    Ok(BigUint::from(count) * BigUint::from(n / h))
}

/// Largest number of automorphisms enumerated by [`tuple_degree`].
pub const MAX_TUPLE_AUTOMORPHISMS: u64 = 4_000_000;

/// `[Q(a_1, ..., a_k) : Q]`, counted as the orbit of the tuple under the
/// Galois group of `Q(ζ_n, ℓ^(1/e_ℓ))` by direct enumeration of its
/// automorphisms `(b, c)`.
pub fn tuple_degree(elems: &[RadicalMonomial]) -> Result<BigUint> {
    if elems.is_empty() {
        return Ok(BigUint::one());
    }
    if elems.iter().all(|e| e.is_positive_real()) {
        return field_degree(elems);
    }
    let mut exps: BTreeMap<BigUint, BigInt> = BTreeMap::new();
    let mut n = BigInt::from(4);
    for a in elems {
        n = n.lcm(a.turn().denom());
        for (p, c) in a.log_abs().terms() {
            let e = exps.entry(p.clone()).or_insert_with(BigInt::one);
            *e = e.lcm(c.denom());
            n = n.lcm(c.denom());
        }
    }
    let n = to_u64(&n, "cyclotomic level")?;
    let primes: Vec<(BigUint, u64)> = exps
        .into_iter()
        .filter(|(_, e)| !e.is_one())
        .map(|(p, e)| (p, e.to_u64().unwrap()))
        .collect();
    let mut total = totient(n) as u128;
    for (_, e) in &primes {
        total *= *e as u128;
    }
    if total > MAX_TUPLE_AUTOMORPHISMS as u128 {
        return Err(Error::BudgetExceeded(format!(
            "degree of the generated field needs {total} automorphisms"
        )));
    }
    let even: Vec<usize> = (0..primes.len()).filter(|&i| primes[i].1.is_multiple_of(2)).collect();
    if even.len() > MAX_EVEN_PRIMES {
        return Err(Error::BudgetExceeded(format!("{} primes with even root index", even.len())));
    }
    // every subset S of even-index primes with √(∏S) ∈ Q(ζ_n)
    let mut constraints: Vec<(Vec<usize>, u128)> = Vec::new();
    for mask in 1u32..(1u32 << even.len()) {
        let mut s: u128 = 1;
        let mut ok = true;
        let mut members = Vec::new();
        for (k, &i) in even.iter().enumerate() {
            if mask >> k & 1 == 1 {
                members.push(i);
                match primes[i].0.to_u128().and_then(|p| s.checked_mul(p)) {
                    Some(v) if v <= n as u128 => s = v,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok && (n as u128).is_multiple_of(quadratic_discriminant(s)) {
            constraints.push((members, quadratic_discriminant(s)));
        }
    }
    // exponent of ζ_n in each coordinate: turn part and per-prime shifts
    let nr = BigRational::from_integer(BigInt::from(n));
    let turns: Vec<u64> = elems
        .iter()
        .map(|a| (a.turn() * &nr).to_integer().mod_floor(&BigInt::from(n)).to_u64().unwrap())
        .collect();
    let shifts: Vec<Vec<u64>> = elems
        .iter()
        .map(|a| {
            primes
                .iter()
                .map(|(p, e)| {
                    let u = (a.log_abs().coeff(p) * BigRational::from_integer(BigInt::from(*e)))
                        .to_integer()
                        .mod_floor(&BigInt::from(*e))
                        .to_u64()
                        .unwrap();
                    (u as u128 * (n / e) as u128 % n as u128) as u64
                })
                .collect()
        })
        .collect();

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut c = vec![0u64; primes.len()];
    for b in 1..n {
        if b.gcd(&n) != 1 {
            continue;
        }
        let signs: Vec<u64> = constraints
            .iter()
            .map(|(_, disc)| u64::from(jacobi(*disc as i128, b) == -1))
            .collect();
        c.iter_mut().for_each(|x| *x = 0);
        loop {
            let allowed = constraints
                .iter()
                .zip(&signs)
                .all(|((members, _), s)| members.iter().map(|&i| c[i]).sum::<u64>() % 2 == *s);
            if allowed {
                let img: Vec<u64> = (0..elems.len())
                    .map(|j| {
                        let mut v = turns[j] as u128 * b as u128;
                        for (k, ck) in c.iter().enumerate() {
                            v += shifts[j][k] as u128 * *ck as u128;
                        }
                        (v % n as u128) as u64
                    })
                    .collect();
                seen.insert(img);
            }
            let mut k = 0;
            loop {
                if k == c.len() {
                    break;
                }
                c[k] += 1;
                if c[k] < primes[k].1 {
                    break;
                }
                c[k] = 0;
                k += 1;
            }
            if k == c.len() {
                break;
            }
        }
    }
    Ok(BigUint::from(seen.len()))
}

/// Reduced row echelon form over F2 of subset masks, each carrying the
/// discriminant of the square root it names. Row operations multiply
/// discriminants and strip squares, which keeps the attached character.
fn echelon(rows: &[(u32, u128)]) -> Vec<(u32, u128)> {
    let mut basis: Vec<(u32, u128)> = Vec::new();
    for &(mask, disc) in rows {
        let mut m = mask;
        for b in &basis {
            let piv = b.0.trailing_zeros();
            if m >> piv & 1 == 1 {
                m ^= b.0;
            }
        }
        if m != 0 {
            // find the original row with this reduced mask among valid subsets
            let d = rows.iter().find(|r| r.0 == m).map(|r| r.1).unwrap_or(disc);
            let piv = m.trailing_zeros();
            for b in basis.iter_mut() {
                if b.0 >> piv & 1 == 1 {
                    b.0 ^= m;
                    b.1 = rows.iter().find(|r| r.0 == b.0).map(|r| r.1).unwrap();
                }
            }
            basis.push((m, d));
        }
    }
    basis
}

/// Degree of `Q(ρ_1, ..., ρ_k)` for positive real monomials `ρ_i`: the order
/// of the group they generate in `R_{>0} / Q_{>0}`.
pub fn field_degree(elems: &[RadicalMonomial]) -> Result<BigUint> {
    if let Some(bad) = elems.iter().find(|e| !e.is_positive_real()) {
        return Err(Error::InvalidInput(format!(
            "field degree needs positive real generators, got {bad}"
        )));
    }
    let mut primes: Vec<BigUint> = Vec::new();
    for e in elems {
        for p in e.log_abs().terms().keys() {
            if !primes.contains(p) {
                primes.push(p.clone());
            }
        }
    }
    let l = elems
        .iter()
        .fold(BigInt::one(), |acc, e| acc.lcm(&e.exponent_denominator()));
    let dim = primes.len();
    let lr = BigRational::from_integer(l.clone());
    let mut rows: Vec<Vec<BigInt>> = elems
        .iter()
        .map(|e| {
            primes
                .iter()
                .map(|p| (e.log_abs().coeff(p) * &lr).to_integer().mod_floor(&l))
                .collect()
        })
        .collect();
    for j in 0..dim {
        let mut r = vec![BigInt::zero(); dim];
        r[j] = l.clone();
        rows.push(r);
    }
    // triangularize; the lattice contains l·Z^dim so entries stay reduced mod l
    let mut det = BigInt::one();
    for col in 0..dim {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let piv = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            for &i in &nz {
                if i == piv {
                    continue;
                }
                let q = rows[i][col].div_floor(&rows[piv][col]);
                let pr = rows[piv].clone();
                for (x, y) in rows[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
            }
        }
        let piv = (0..rows.len())
            .find(|&i| !rows[i][col].is_zero())
            .expect("lattice has full rank");
        let row = rows.remove(piv);
        det *= row[col].abs();
    }
    let total = num_traits::pow::Pow::pow(l, dim as u32);
    Ok((total / det).magnitude().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tuple_degrees() {
        let z = |m, k| RadicalMonomial::root_of_unity(m, k).unwrap();
        let r = |p: u64, q: u64, d: u64| RadicalMonomial::make_radical(p, q, d).unwrap();
        let sqrt2 = r(2, 1, 2);
        let sqrt3 = r(3, 1, 2);
        let cbrt2 = r(2, 1, 3);
        assert_eq!(tuple_degree(&[z(4, 1)]).unwrap(), 2u32.into());
        assert_eq!(tuple_degree(&[z(8, 1), sqrt2.clone()]).unwrap(), 4u32.into());
        assert_eq!(tuple_degree(&[sqrt2.clone(), sqrt3.clone(), z(4, 1)]).unwrap(), 8u32.into());
        assert_eq!(tuple_degree(&[z(3, 1), cbrt2.clone()]).unwrap(), 6u32.into());
        for a in [z(8, 1).multiply(&sqrt2), z(3, 1).multiply(&cbrt2), z(12, 5).multiply(&sqrt3), z(5, 2)] {
            assert_eq!(tuple_degree(std::slice::from_ref(&a)).unwrap(), monomial_degree(&a).unwrap(), "{a}");
        }
    }

    fn rm(p: u64, q: u64, d: u64) -> RadicalMonomial {
        RadicalMonomial::make_radical(p, q, d).unwrap()
    }

    #[test]
    fn jacobi_matches_euler() {
        for p in [3u64, 5, 7, 11, 13] {
            for a in 1..p as i128 {
                let e = (0..(p - 1) / 2).fold(1i128, |acc, _| acc * a % p as i128);
                let want = if e == 1 { 1 } else { -1 };
                assert_eq!(jacobi(a, p), want, "a={a} p={p}");
            }
        }
    }

    #[test]
    fn real_degrees() {
        assert_eq!(rm(5, 7, 2).degree().unwrap(), BigUint::from(2u32));
        let prod = rm(5, 7, 2).multiply(&rm(37, 41, 5));
        assert_eq!(prod.degree().unwrap(), BigUint::from(10u32));
        // 2^(1/2) 3^(1/2) = 6^(1/2) has degree 2, not 4
        let six = rm(2, 1, 2).multiply(&rm(3, 1, 2));
        assert_eq!(six.degree().unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn twisted_degrees() {
        let i3 = RadicalMonomial::root_of_unity(4, 1)
            .unwrap()
            .multiply(&RadicalMonomial::from_integer(3).unwrap());
        assert_eq!(i3.degree().unwrap(), BigUint::from(2u32));
        // ζ_8 · √2 = 1 + i
        let z = RadicalMonomial::root_of_unity(8, 1).unwrap().multiply(&rm(2, 1, 2));
        assert_eq!(z.degree().unwrap(), BigUint::from(2u32));
        // ζ_3 has degree 2, ζ_7 degree 6
        assert_eq!(RadicalMonomial::root_of_unity(3, 1).unwrap().degree().unwrap(), BigUint::from(2u32));
        assert_eq!(RadicalMonomial::root_of_unity(7, 2).unwrap().degree().unwrap(), BigUint::from(6u32));
        // ζ_3 · 2^(1/3): a root of x^3 - 2, degree 3
        let w = RadicalMonomial::root_of_unity(3, 1).unwrap().multiply(&rm(2, 1, 3));
        assert_eq!(w.degree().unwrap(), BigUint::from(3u32));
    }

    #[test]
    fn field_degrees() {
        let gens = [rm(5, 7, 2), rm(37, 41, 5), rm(131, 137, 7)];
        assert_eq!(field_degree(&gens).unwrap(), BigUint::from(70u32));
        let dependent = [rm(2, 1, 2), rm(3, 1, 2), rm(2, 1, 1).multiply(&rm(3, 1, 2))];
        assert_eq!(field_degree(&dependent).unwrap(), BigUint::from(4u32));
    }
}
