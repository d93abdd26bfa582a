use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

use northcott_core::algebraic::RadicalMonomial;
use northcott_core::heights::weil_height;
use northcott_core::matrix::{spectral_height, StructuredMatrix};
use northcott_core::northcott::enumerate_bounded;
use northcott_core::{Error, LogLinear, Real};

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn rat() -> impl Strategy<Value = BigRational> {
    (-40i64..=40, 1i64..=12).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn loglinear() -> impl Strategy<Value = LogLinear> {
    prop::collection::vec((0usize..PRIMES.len(), rat()), 0..4).prop_map(|terms| {
        LogLinear::from_terms(terms.into_iter().map(|(i, c)| (BigUint::from(PRIMES[i]), c)))
    })
}

fn monomial() -> impl Strategy<Value = RadicalMonomial> {
    (0i64..12, 1i64..=12, loglinear())
        .prop_map(|(k, m, l)| RadicalMonomial::from_parts(BigRational::new(k.into(), m.into()), l))
}

proptest! {
    #[test]
    fn loglinear_group_laws(x in loglinear(), y in loglinear(), z in loglinear()) {
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
        prop_assert!((&x - &x).is_zero());
        prop_assert_eq!(-(-x.clone()), x);
    }

    #[test]
    fn loglinear_scale_distributes(x in loglinear(), y in loglinear(), k in rat()) {
        prop_assert_eq!((&x + &y).scale(&k), &x.scale(&k) + &y.scale(&k));
    }

    #[test]
    fn loglinear_order_matches_floats(x in loglinear(), y in loglinear()) {
        let gap = x.approx() - y.approx();
        prop_assume!(gap.abs() > 1e-9);
        prop_assert_eq!(x.cmp(&y), gap.partial_cmp(&0.0).unwrap());
    }

    #[test]
    fn loglinear_text_and_json_round_trip(x in loglinear()) {
        prop_assert_eq!(x.to_string().parse::<LogLinear>().unwrap(), x.clone());
        let json = serde_json::to_string(&x).unwrap();
        prop_assert_eq!(serde_json::from_str::<LogLinear>(&json).unwrap(), x);
    }

    #[test]
    fn real_compare_agrees_with_loglinear(x in loglinear(), y in loglinear()) {
        let got = Real::from(x.clone()).compare(&Real::from(y.clone())).unwrap();
        prop_assert_eq!(got, x.cmp(&y));
    }

    #[test]
    fn real_arithmetic_cancels(x in loglinear(), y in loglinear(), k in rat()) {
        prop_assume!(k != BigRational::from_integer(0.into()));
        let kx = Real::from(k.clone()).mul(&Real::from(x.clone()));
        let back = kx.add(&Real::from(y.clone())).sub(&Real::from(y));
        prop_assert!(back.compare(&Real::from(x.scale(&k))).unwrap().is_eq());
        let q = kx.div(&Real::from(k)).unwrap();
        prop_assert!(q.compare(&Real::from(x)).unwrap().is_eq());
    }

    #[test]
    fn real_products_of_logs_order(a in 2u64..60, b in 2u64..60, c in 2u64..60, d in 2u64..60) {
        // log a · log b vs log c · log d
        let lhs = Real::from(LogLinear::ln_u64(a)).mul(&Real::from(LogLinear::ln_u64(b)));
        let rhs = Real::from(LogLinear::ln_u64(c)).mul(&Real::from(LogLinear::ln_u64(d)));
        let f = (a as f64).ln() * (b as f64).ln() - (c as f64).ln() * (d as f64).ln();
        match lhs.compare(&rhs) {
            Ok(o) => {
                if f.abs() > 1e-9 {
                    prop_assert_eq!(o, f.partial_cmp(&0.0).unwrap());
                }
            }
            Err(Error::Undecided(_)) => prop_assert!(f.abs() < 1e-9),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn height_identities(a in monomial(), b in monomial(), e in -6i64..=6) {
        let ha = weil_height(&a);
        prop_assert!(ha.signum().is_ge());
        prop_assert_eq!(weil_height(&a.inverse()), ha.clone());
        prop_assert_eq!(weil_height(&a.pow(e)), ha.scale(&BigRational::from_integer(e.abs().into())));
        prop_assert!(weil_height(&a.multiply(&b)) <= &ha + &weil_height(&b));
    }

    #[test]
    fn spectral_height_is_similarity_invariant(
        m in prop::collection::vec(-6i64..=6, 4),
        shears in prop::collection::vec((any::<bool>(), -3i64..=3), 1..4),
    ) {
        let a = [[m[0], m[1]], [m[2], m[3]]];
        // P is a product of elementary shears, so P^{-1} is integral too
        let mut p = [[1i64, 0], [0, 1]];
        let mut pinv = [[1i64, 0], [0, 1]];
        for (upper, t) in shears {
            let (e, einv) = if upper {
                ([[1, t], [0, 1]], [[1, -t], [0, 1]])
            } else {
                ([[1, 0], [t, 1]], [[1, 0], [-t, 1]])
            };
            p = mul2(&p, &e);
            pinv = mul2(&einv, &pinv);
        }
        let b = mul2(&mul2(&p, &a), &pinv);
        let h = spectral_height(&StructuredMatrix::rational_i64(&[&a[0], &a[1]]));
        prop_assume!(h.is_ok());
        let hb = spectral_height(&StructuredMatrix::rational_i64(&[&b[0], &b[1]])).unwrap();
        prop_assert_eq!(hb, h.clone().unwrap());
        let scaled = [[3 * a[0][0], 3 * a[0][1]], [3 * a[1][0], 3 * a[1][1]]];
        let hs = spectral_height(&StructuredMatrix::rational_i64(&[&scaled[0], &scaled[1]])).unwrap();
        prop_assert_eq!(hs, h.unwrap());
    }
}

fn mul2(x: &[[i64; 2]; 2], y: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn normalize(mut c: Vec<BigInt>) -> Vec<BigInt> {
    while c.last().is_some_and(|x| *x == BigInt::from(0)) {
        c.pop();
    }
    if c.last().is_some_and(|x| *x < BigInt::from(0)) {
        c.iter_mut().for_each(|x| *x = -x.clone());
    }
    c
}

#[test]
fn enumeration_closed_under_negation_and_reversal() {
    let e = enumerate_bounded(3, 0.45).unwrap();
    let set: std::collections::BTreeSet<Vec<BigInt>> =
        e.polynomials.iter().map(|p| p.polynomial.coeffs().to_vec()).collect();
    assert!(set.len() > 10);
    for c in &set {
        let neg: Vec<BigInt> =
            c.iter().enumerate().map(|(i, x)| if i % 2 == 1 { -x.clone() } else { x.clone() }).collect();
        assert!(set.contains(&normalize(neg)), "x -> -x image of {c:?}");
        if c[0] != BigInt::from(0) {
            let rev: Vec<BigInt> = c.iter().rev().cloned().collect();
            assert!(set.contains(&normalize(rev)), "reversal of {c:?}");
        }
    }
}
