//! Library results against slow, independent reimplementations.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::BigRational;

use northcott_core::algebraic::{monomial_degree, tuple_degree, RadicalMonomial};
use northcott_core::group::{
    all_subgroups_by_extension, elements, multiply, power, power_iterated, subgroup_census, GroupElem,
};
use northcott_core::northcott::is_irreducible_small;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn totient(m: u64) -> u64 {
    (1..=m).filter(|&k| gcd(k, m) == 1).count() as u64
}

#[test]
fn root_of_unity_degree_is_totient() {
    for m in 1..=60u64 {
        for k in 0..m {
            let z = RadicalMonomial::root_of_unity(m, k as i64).unwrap();
            let order = m / gcd(k, m);
            assert_eq!(monomial_degree(&z).unwrap(), BigUint::from(totient(order)), "zeta_{m}^{k}");
        }
    }
}

#[test]
fn prime_power_radical_degree() {
    // p^(a/b) in lowest terms has degree b (Eisenstein)
    for p in [2u64, 3, 5, 7] {
        for b in 1..=12i64 {
            for a in 1..=b {
                let t = BigRational::new(a.into(), b.into());
                let l = northcott_core::LogLinear::ln_u64(p).scale(&t);
                let x = RadicalMonomial::from_parts(BigRational::from_integer(0.into()), l);
                let want = b as u64 / gcd(a as u64, b as u64);
                assert_eq!(monomial_degree(&x).unwrap(), BigUint::from(want), "{p}^({a}/{b})");
            }
        }
    }
}

#[test]
fn cyclotomic_times_odd_radical_field() {
    // an odd-degree pure radical field meets every abelian field in Q
    for m in [3u64, 4, 5, 7, 8, 9, 12] {
        for b in [3u64, 5, 7] {
            let z = RadicalMonomial::root_of_unity(m, 1).unwrap();
            let r = RadicalMonomial::make_radical(2, 1, b).unwrap();
            assert_eq!(tuple_degree(&[z, r]).unwrap(), BigUint::from(totient(m) * b), "m={m} b={b}");
        }
    }
}

fn mul_raw(d: u64, x: (u64, u64), y: (u64, u64)) -> (u64, u64) {
    ((x.0 + x.1 * y.0) % d, (x.1 * y.1) % d)
}

/// All subgroups by testing every subset that contains the identity.
fn subgroups_by_power_set(d: u64) -> BTreeSet<Vec<(u64, u64)>> {
    let els: Vec<(u64, u64)> = (1..d).flat_map(|b| (0..d).map(move |a| (a, b))).filter(|&e| e != (0, 1)).collect();
    let mut out = BTreeSet::new();
    for mask in 0u64..(1 << els.len()) {
        let mut s: Vec<(u64, u64)> = vec![(0, 1)];
        s.extend(els.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| *e));
        let set: BTreeSet<(u64, u64)> = s.iter().copied().collect();
        if s.iter().all(|&x| s.iter().all(|&y| set.contains(&mul_raw(d, x, y)))) {
            out.insert(set.into_iter().collect());
        }
    }
    out
}

fn as_pairs(subs: &[Vec<GroupElem>]) -> BTreeSet<Vec<(u64, u64)>> {
    subs.iter()
        .map(|s| {
            let set: BTreeSet<(u64, u64)> = s.iter().map(|g| (g.a, g.b)).collect();
            set.into_iter().collect()
        })
        .collect()
}

#[test]
fn census_matches_power_set() {
    for d in [3u64, 5] {
        let census = subgroup_census(d).unwrap();
        assert_eq!(as_pairs(&census.subgroups), subgroups_by_power_set(d), "d = {d}");
    }
}

#[test]
fn census_matches_extension_closure() {
    for d in [3u64, 5, 7] {
        let census = subgroup_census(d).unwrap();
        let slow = all_subgroups_by_extension(d).unwrap();
        assert_eq!(as_pairs(&census.subgroups), as_pairs(&slow), "d = {d}");
    }
}

#[test]
fn power_closed_form_exhaustive() {
    for d in [3u64, 5, 7, 11, 13] {
        for g in elements(d) {
            for s in 0..=2 * d {
                assert_eq!(power(d, g, s), power_iterated(d, g, s), "d={d} g={g:?} s={s}");
            }
            let ab = multiply(d, g, g);
            assert_eq!(ab, power(d, g, 2));
        }
    }
}

/// Exact division over the rationals; true when the remainder vanishes.
fn divides(g: &[i64], f: &[i64]) -> bool {
    let mut r: Vec<BigRational> = f.iter().map(|&x| BigRational::from_integer(x.into())).collect();
    let lg = BigRational::from_integer((*g.last().unwrap()).into());
    while r.len() >= g.len() {
        let k = r.last().unwrap() / &lg;
        let shift = r.len() - g.len();
        for (i, &gi) in g.iter().enumerate() {
            r[shift + i] -= &k * BigRational::from_integer(gi.into());
        }
        r.pop();
    }
    r.iter().all(|x| *x == BigRational::from_integer(0.into()))
}

/// Searches integer factors of degree 1 and 2. A factor `c + bx + ax^2`
/// has `a | lead`, `c | f(0)`, and `|b| <= 2aR` for the Cauchy root bound `R`.
fn has_small_factor(f: &[i64]) -> bool {
    let lead = *f.last().unwrap();
    let m = f.iter().map(|x| x.abs()).max().unwrap();
    let r = 1 + (m + lead.abs() - 1) / lead.abs();
    let divs = |n: i64| -> Vec<i64> {
        (1..=n.abs()).filter(|k| n % k == 0).flat_map(|k| [k, -k]).collect()
    };
    for a in divs(lead).into_iter().filter(|a| *a > 0) {
        for c in divs(f[0]) {
            if divides(&[c, a], f) {
                return true;
            }
            if f.len() >= 5 {
                let bound = 2 * a * r;
                if (-bound..=bound).any(|b| divides(&[c, b, a], f)) {
                    return true;
                }
            }
        }
    }
    false
}

#[test]
fn irreducibility_against_factor_search() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..400 {
        let deg = rng.gen_range(2..=4);
        let mut f: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-4..=4)).collect();
        if f[deg] == 0 {
            f[deg] = 1;
        }
        if f[0] == 0 {
            continue;
        }
        let g = f.iter().fold(0u64, |acc, &x| gcd(acc, x.unsigned_abs()));
        if g != 1 {
            continue;
        }
        if f[deg] < 0 {
            f.iter_mut().for_each(|x| *x = -*x);
        }
        assert_eq!(is_irreducible_small(&f), !has_small_factor(&f), "{f:?}");
    }
}
