//! Reproducibility suite: nine end-to-end checks with pinned expectations
//! and tolerances. Shared by the `acceptance` test target and the CLI.

use std::time::{Duration, Instant};

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebraic::RadicalMonomial;
use crate::error::Result;
use crate::exact::{LogLinear, Real};
use crate::group::subgroup_census;
use crate::heights::{h2_height, h2_rational, rational_height, weil_height, LimitRatio, ProjectiveTuple, Weight};
use crate::matrix::{
    class_degree_bracket, column_h2, matrix_degree, operator_height_diagonal, operator_height_lower,
    prop_spectral_check, spectral_height, StructuredMatrix,
};
use crate::northcott::{enumerate_bounded, northcott_bracket};
use crate::tower::{build_tower, extension_witness, verify_tower, witness, BuildOptions, TowerSpec, WitnessVariant};

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "tower reproduction, w = 1"),
    (2, "bracket convergence, w = 1"),
    (3, "weighted tower, w = d^(1/2)"),
    (4, "degree-4 extension witnesses, w = d^(1/2)"),
    (5, "subgroup census, odd d <= 31"),
    (6, "spectral heights"),
    (7, "operator heights"),
    (8, "bounded enumeration"),
    (9, "height identities"),
];

/// Criteria run by `selftest --quick`.
pub const QUICK: [u32; 3] = [1, 4, 6];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.2}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds
        )
    }
}

struct Checks {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { failures: Vec::new(), notes: Vec::new() }
    }
    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
    fn within(&mut self, elapsed: Duration, limit_s: f64) {
        self.check(elapsed.as_secs_f64() < limit_s, format!("runtime {:.1}s over {limit_s}s", elapsed.as_secs_f64()));
    }
}

fn ln(n: u64) -> LogLinear {
    LogLinear::ln_u64(n)
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn w1_tower(levels: usize) -> Result<TowerSpec> {
    build_tower(&ln(2), 1, &Weight::constant(1), levels, &BuildOptions::default())
}

fn sqrt_tower(levels: usize) -> Result<TowerSpec> {
    build_tower(&ln(2), 1, &Weight::gamma(1, 2), levels, &BuildOptions::default())
}

fn u64s(v: &[num_bigint::BigUint]) -> Vec<u64> {
    v.iter().map(|x| x.try_into().unwrap_or(u64::MAX)).collect()
}

fn criterion_1(c: &mut Checks) -> Result<()> {
    let t = Instant::now();
    let spec = w1_tower(12)?;
    let elapsed = t.elapsed();
    let d: Vec<u64> = spec.levels.iter().map(|l| l.d).collect();
    let p = u64s(&spec.levels.iter().map(|l| l.p.clone()).collect::<Vec<_>>());
    let qv = u64s(&spec.levels.iter().map(|l| l.q.clone()).collect::<Vec<_>>());
    c.check(d.len() == 12, "12 levels");
    c.check(d[..5] == [2, 5, 7, 11, 13], format!("d prefix {:?}", &d[..5]));
    c.check(p[..3] == [5, 37, 131], format!("p prefix {:?}", &p[..3]));
    c.check(qv[..3] == [7, 41, 137], format!("q prefix {:?}", &qv[..3]));
    let reports = verify_tower(&spec)?;
    let bad: Vec<usize> = reports.iter().filter(|r| !r.all_ok()).map(|r| r.i).collect();
    c.check(bad.is_empty(), format!("levels failing verification: {bad:?}"));
    c.within(elapsed, 60.0);
    c.note(format!("d = {d:?}"));
    Ok(())
}

fn criterion_2(c: &mut Checks) -> Result<()> {
    let spec = w1_tower(12)?;
    let b = northcott_bracket(&spec, 12)?;
    let log2 = Real::from(ln(2));
    let expect = [ln(7).scale(&q(1, 2)), ln(41).scale(&q(1, 5)), ln(137).scale(&q(1, 7))];
    for (l, e) in b.levels.iter().zip(&expect) {
        c.check(l.upper.as_loglinear().as_ref() == Some(e), format!("upper_{} = {}", l.i, l.upper));
    }
    for w in b.levels.windows(2) {
        c.check(w[1].upper.compare(&w[0].upper)?.is_lt(), format!("upper_{} does not decrease", w[1].i));
    }
    for l in &b.levels {
        c.check(l.upper.compare(&log2)?.is_gt(), format!("upper_{} <= log 2", l.i));
    }
    let Some(k) = b.levels.iter().position(|l| l.d >= 17) else {
        c.check(false, "no level with d >= 17");
        return Ok(());
    };
    let l = &b.levels[k];
    let d = l.d;
    let lower = l.lower.clone().expect("d > N");
    let dev_ok = l.upper.sub(&log2).compare(&Real::from(ln(4)).mul(&Real::rat(1, d as i64)))?.is_le();
    c.check(dev_ok, format!("|upper - log 2| > log 4/{d} at level {}", l.i));
    let floor = log2.sub(&Real::from(ln(d).scale(&q(1, 2 * (d as i64 - 1)))));
    c.check(lower.compare(&floor)?.is_ge(), format!("lower_{} below log 2 - log d/(2(d-1))", l.i));
    let widths: Vec<Real> = b.levels.iter().map(|l| l.upper.sub(l.lower.as_ref().unwrap())).collect();
    c.check(widths[k].compare(&Real::rat(17, 100))?.is_le(), format!("width {:.4} > 0.17", widths[k].approx()));
    for j in k..widths.len() - 1 {
        c.check(widths[j + 1].compare(&widths[j])?.is_lt(), format!("width grows at level {}", j + 2));
    }
    c.note(format!("first d >= 17 at level {} (d = {d}), width {:.5}", l.i, widths[k].approx()));
    Ok(())
}

fn criterion_3(c: &mut Checks) -> Result<()> {
    let t = Instant::now();
    let spec = sqrt_tower(20)?;
    let elapsed = t.elapsed();
    let reports = verify_tower(&spec)?;
    let bad: Vec<usize> = reports.iter().filter(|r| !r.all_ok()).map(|r| r.i).collect();
    c.check(bad.is_empty(), format!("levels failing verification: {bad:?}"));
    let log2 = Real::from(ln(2));
    let log4 = Real::from(ln(4));
    for l in &spec.levels {
        let hw = witness(&spec, l.i, WitnessVariant::NthRoot)?.weighted_height;
        let slack = log4.div(&Real::pow_int(l.d, &q(1, 2))?)?;
        let dev = hw.sub(&log2);
        let ok = dev.signum()?.is_ge() && dev.compare(&slack)?.is_le();
        c.check(ok, format!("level {} witness {:.6} not within log4/sqrt(d) of log 2", l.i, hw.approx()));
    }
    let last = spec.levels.last().unwrap();
    c.check(last.p < num_bigint::BigUint::from(10u64.pow(14)), format!("p_20 = {}", last.p));
    c.within(elapsed, 60.0);
    c.note(format!("d_20 = {}, p_20 = {}", last.d, last.p));
    Ok(())
}

fn criterion_4(c: &mut Checks) -> Result<()> {
    let w = Weight::gamma(1, 2);
    let lw = w.l_w(4)?;
    c.check(lw == LimitRatio::Value(Real::from(2i64)), "l_w(4) is not exactly 2");
    let t = Instant::now();
    let mut spec = sqrt_tower(20)?;
    while spec.levels.last().unwrap().d < 1601 && spec.levels.len() < 30 {
        spec = sqrt_tower(spec.levels.len() + 2)?;
    }
    let half_c = Real::from(ln(2).scale(&q(1, 2)));
    let mut deepest = None;
    for l in &spec.levels {
        let hw = extension_witness(&spec, l.i, 4)?.weighted_height;
        let dev = hw.sub(&half_c);
        let slack = Real::from(ln(4)).div(&Real::from(2u64).mul(&Real::pow_int(l.d, &q(1, 2))?))?;
        c.check(
            dev.signum()?.is_ge() && dev.compare(&slack)?.is_le(),
            format!("level {}: deviation {:.3e} exceeds log4/(2 sqrt d)", l.i, dev.approx()),
        );
        if l.d >= 1601 {
            let five = half_c.mul(&Real::rat(5, 100));
            c.check(dev.compare(&five)?.is_le(), format!("level {}: deviation above 5% of c/2", l.i));
            deepest.get_or_insert((l.i, l.d, dev.approx() / half_c.approx()));
        }
    }
    c.within(t.elapsed(), 60.0);
    match deepest {
        Some((i, d, r)) => c.note(format!("level {i} reaches d = {d}, relative deviation {:.3e}", r)),
        None => c.check(false, "no level reached d >= 1601"),
    }
    Ok(())
}

fn criterion_5(c: &mut Checks) -> Result<()> {
    let t = Instant::now();
    let ds = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31];
    let mut total = 0;
    for d in ds {
        let cen = subgroup_census(d)?;
        total += cen.subgroups.len();
        c.check(cen.counts_by_order.get(&d) == Some(&1), format!("d = {d}: order-d count"));
        c.check(cen.counts_by_order.get(&(d - 1)) == Some(&(d as usize)), format!("d = {d}: order-(d-1) count"));
        c.check(cen.claims.all(), format!("d = {d}: claims {:?}", cen.claims));
    }
    c.within(t.elapsed(), 10.0);
    c.note(format!("{total} subgroups over d = 3..31"));
    Ok(())
}

fn criterion_6(c: &mut Checks) -> Result<()> {
    let a = StructuredMatrix::rational_i64(&[&[1, 1], &[-1, 1]]);
    c.check(spectral_height(&a)?.is_zero(), "h_s([[1,1],[-1,1]]) != 0");
    let spec = w1_tower(8)?;
    let a1 = crate::tower::alpha(&spec.levels[0])?;
    let blk = StructuredMatrix::Block { n: 3, alpha: a1 };
    c.check(spectral_height(&blk)? == ln(7).scale(&q(1, 4)), "h_s(A_1) != log 7 / 4");
    let r = prop_spectral_check(&spec, 3, 8)?;
    for l in &r.levels {
        c.check(l.equality, format!("level {}: h_s^w != h^w(α)/2", l.i));
    }
    c.note(format!("8 levels, last value {:.6}", r.levels.last().unwrap().rhs.approx()));
    Ok(())
}

fn random_monomial(rng: &mut ChaCha8Rng) -> Result<RadicalMonomial> {
    let m = [1i64, 2, 3, 4, 6][rng.gen_range(0..5)];
    let turn = q(rng.gen_range(0..m), m);
    let primes = [2u64, 3, 5, 7];
    let mut terms: Vec<(num_bigint::BigUint, BigRational)> = Vec::new();
    for p in primes {
        if rng.gen_bool(0.5) {
            let den = [1, 2, 3][rng.gen_range(0..3)];
            terms.push((p.into(), q(rng.gen_range(-4..=4), den)));
        }
    }
    Ok(RadicalMonomial::from_parts(turn, LogLinear::from_terms(terms)))
}

fn criterion_7(c: &mut Checks) -> Result<()> {
    let d = StructuredMatrix::rational_i64(&[&[3, 0], &[0, 4]]);
    c.check(operator_height_diagonal(&d, &Weight::constant(1))? == Real::from(ln(4)), "h_op(diag(3,4)) != log 4");
    let h2 = h2_height(&ProjectiveTuple::from_i64(&[3, 4]))?;
    c.check(h2.as_loglinear() == Some(ln(5)), format!("h_2(3,4) = {h2}"));
    let float = (3f64 * 3.0 + 4.0 * 4.0).sqrt().ln();
    c.check((h2.approx() - float).abs() <= 1e-9, "h_2(3,4) float mismatch");
    c.check(h2_rational(&ProjectiveTuple::from_i64(&[3, 4]))? == ln(5), "h_2 via integers");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let weights = [Weight::constant(1), Weight::gamma(1, 2)];
    for k in 0..100 {
        let n = rng.gen_range(2..=4);
        let entries: Vec<Option<RadicalMonomial>> = (0..n)
            .map(|j| if j > 0 && rng.gen_bool(0.15) { Ok(None) } else { random_monomial(&mut rng).map(Some) })
            .collect::<Result<_>>()?;
        let a = StructuredMatrix::Diagonal { entries };
        let w = &weights[k % 2];
        let hop = operator_height_diagonal(&a, w)?;
        for j in 0..n {
            let col = column_h2(&a, j)?;
            let lhs = if col.signum()?.is_eq() { Real::zero() } else { w.eval(&matrix_degree(&a)?)?.mul(&col) };
            c.check(lhs.compare(&hop)?.is_le(), format!("matrix {k}, column {j}"));
        }
        if a.rational_rows().is_some() {
            let lb = operator_height_lower(&a, &[])?;
            let plain = operator_height_diagonal(&a, &Weight::constant(1))?;
            c.check(Real::from(lb.value).compare(&plain)?.is_le(), format!("matrix {k}: probe bound above h_op"));
        }
        let b = class_degree_bracket(&a)?;
        c.check(b.lower <= b.upper, format!("matrix {k}: class bracket inverted"));
    }
    c.note("100 random diagonal matrices");
    Ok(())
}

fn criterion_8(c: &mut Checks) -> Result<()> {
    let t = Instant::now();
    let e = enumerate_bounded(2, 0.2)?;
    let mut got: Vec<Vec<i64>> = e
        .polynomials
        .iter()
        .map(|p| p.polynomial.coeffs().iter().map(|x| x.try_into().unwrap()).collect())
        .collect();
    got.sort();
    let mut want = vec![vec![0, 1], vec![-1, 1], vec![1, 1], vec![1, 0, 1], vec![1, 1, 1], vec![1, -1, 1]];
    want.sort();
    c.check(got == want, format!("degree <= 2 torsion polynomials {got:?}"));
    c.check(e.count == 9, format!("count {}", e.count));
    let r = enumerate_bounded(1, 2f64.ln() + 1e-6)?;
    c.check(r.count == 7, format!("rationals of height <= log 2: {}", r.count));
    c.within(t.elapsed(), 60.0);
    c.note(format!("{} + {} algebraic numbers", e.count, r.count));
    Ok(())
}

/// `Σ_p v_p(n) log p` by trial division.
fn log_by_trial_division(mut n: u64) -> LogLinear {
    let mut out = LogLinear::zero();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out = &out + &ln(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out = &out + &ln(n);
    }
    out
}

fn criterion_9(c: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..1000 {
        let a = random_monomial(&mut rng)?;
        let b = random_monomial(&mut rng)?;
        let ha = weil_height(&a);
        let n = rng.gen_range(1..=6u64);
        let real = RadicalMonomial::from_parts(BigRational::zero(), a.log_abs().clone());
        let root = real.nth_root(n)?;
        c.check(weil_height(&root) == weil_height(&real).scale(&q(1, n as i64)), format!("sample {k}: root scaling"));
        let e = rng.gen_range(-5..=5i64);
        c.check(weil_height(&a.pow(e)) == ha.scale(&q(e.abs(), 1)), format!("sample {k}: power scaling"));
        c.check(weil_height(&a.inverse()) == ha, format!("sample {k}: inverse"));
        let hab = weil_height(&a.multiply(&b));
        c.check(hab <= &ha + &weil_height(&b), format!("sample {k}: subadditivity"));
        let (p, qq) = (rng.gen_range(-10_000..=10_000i64), rng.gen_range(1..=10_000i64));
        if p != 0 {
            let g = p.gcd(&qq);
            let want = ln((p / g).unsigned_abs().max((qq / g) as u64));
            let x = RadicalMonomial::from_rational(&q(p, qq))?;
            c.check(weil_height(&x) == want, format!("sample {k}: h({p}/{qq})"));
            c.check(rational_height(&q(p, qq)) == want, format!("sample {k}: rational height"));
        }
    }
    for k in 0..500 {
        let p = rng.gen_range(1..=1_000_000u64);
        let qq = rng.gen_range(1..=1_000_000u64);
        let x = q(p as i64, qq as i64);
        // archimedean place
        let arch = LogLinear::ln_rational(&x.abs())?;
        // finite places: log|x|_p = -v_p(x) log p
        let g = p.gcd(&qq);
        let finite = &log_by_trial_division(qq / g) - &log_by_trial_division(p / g);
        let residual = &arch + &finite;
        c.check(residual.is_zero(), format!("product formula residual {residual} for sample {k}"));
    }
    c.note("1000 monomial samples, 500 rationals");
    Ok(())
}

/// Run one criterion by number.
pub fn run_criterion(id: u32) -> CriterionResult {
    let title = CRITERIA.iter().find(|(k, _)| *k == id).map(|(_, t)| t.to_string()).unwrap_or_default();
    let t = Instant::now();
    let mut c = Checks::new();
    let outcome = match id {
        1 => criterion_1(&mut c),
        2 => criterion_2(&mut c),
        3 => criterion_3(&mut c),
        4 => criterion_4(&mut c),
        5 => criterion_5(&mut c),
        6 => criterion_6(&mut c),
        7 => criterion_7(&mut c),
        8 => criterion_8(&mut c),
        9 => criterion_9(&mut c),
        _ => {
            c.check(false, format!("unknown criterion {id}"));
            Ok(())
        }
    };
    if let Err(e) = outcome {
        c.check(false, format!("error: {e}"));
    }
    let passed = c.failures.is_empty();
    let detail = if passed { c.notes.join("; ") } else { c.failures.join("; ") };
    CriterionResult { id, title, passed, detail, seconds: t.elapsed().as_secs_f64() }
}

pub fn run(ids: &[u32]) -> Vec<CriterionResult> {
    ids.iter().map(|&id| run_criterion(id)).collect()
}

pub fn all_ids() -> Vec<u32> {
    CRITERIA.iter().map(|(k, _)| *k).collect()
}
