//! Kummer towers `L = Q((p_i/q_i)^(1/d_i) | i ≥ 1)` with prescribed
//! Northcott number `c` for the weighted height `h^w` on `L^(N)`.
//!
//! Level `i` uses the threshold `t_i = N d_i c / w(N D_i)` and must satisfy
//!
//! * (n-1) `d_1 >= d0`
//! * (first_threshold)  `t_1 >= log 2`
//! * (threshold_gap)  `t_i + log 4 <= t_(i+1)`
//! * (p_window)  `t_i <= log p_i <= t_i + log 2`
//! * (q_window)  `p_i < q_i < 2 p_i`
//! * (n4)  when `w → 0`: `w(N D_i) < w(N D_(i-1)) / i^2`
//!
//! where `D_i = d_i` if `lim w > 0` and `D_i = d_1 ⋯ d_i` otherwise.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algebraic::RadicalMonomial;
use crate::error::{Error, Result};
use crate::exact::{is_prime, next_prime, smallest_prime_in, Bound, LogLinear, Real};
use crate::heights::{weighted_height, LimitClass, Weight};

/// Largest degree the builder will try when searching for the next `d_i`.
pub const MAX_DEGREE_SEARCH: u64 = 1_000_000;

/// Largest threshold `t_i` (in nats) accepted before prime search.
pub const MAX_THRESHOLD: f64 = 4096.0;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelRecord {
    pub i: usize,
    pub d: u64,
    #[serde(with = "crate::json::biguint")]
    pub p: BigUint,
    #[serde(with = "crate::json::biguint")]
    pub q: BigUint,
    /// `D_i`.
    #[serde(with = "crate::json::biguint")]
    pub big_d: BigUint,
    /// `t_i = N d_i c / w(N D_i)`.
    pub threshold: Real,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerSpec {
    pub c: LogLinear,
    pub n: u64,
    pub weight: Weight,
    pub d0: u64,
    pub limit_class: LimitClass,
    /// Require `d_1 > N` so every level falls under the degree dichotomy.
    pub require_d_gt_n: bool,
    pub levels: Vec<LevelRecord>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildOptions {
    pub require_d_gt_n: bool,
}

fn threshold(c: &LogLinear, n: u64, d: u64, big_d: &BigUint, w: &Weight) -> Result<Real> {
    let nd = BigUint::from(n) * big_d;
    let num = Real::from(c.scale(&num_rational::BigRational::from_integer((n * d).into())));
    num.div(&w.eval(&nd)?)
}

fn ln2() -> Real {
    Real::from(LogLinear::ln_u64(2))
}

fn ln4() -> Real {
    Real::from(LogLinear::ln_u64(4))
}

fn big_d_for(positive_limit: bool, prev: Option<&BigUint>, d: u64) -> BigUint {
    if positive_limit {
        BigUint::from(d)
    } else {
        prev.cloned().unwrap_or_else(BigUint::one) * d
    }
}

fn guard_threshold(t: &Real) -> Result<()> {
    let a = t.approx();
    if !a.is_finite() || a > MAX_THRESHOLD {
        return Err(Error::BudgetExceeded(format!(
            "threshold {a:.4e} needs primes beyond the search budget"
        )));
    }
    Ok(())
}

/// `w(N D_i) < w(N D_(i-1)) / i^2`.
fn weight_decay(w: &Weight, n: u64, big_d: &BigUint, prev_big_d: &BigUint, i: usize) -> Result<bool> {
    let nb = BigUint::from(n);
    let cur = w.eval(&(&nb * big_d))?;
    let prev = w.eval(&(&nb * prev_big_d))?;
    let i2 = Real::from((i as u64) * (i as u64));
    Ok(cur.mul(&i2).compare(&prev)?.is_lt())
}

fn find_primes(t: &Real) -> Result<(BigUint, BigUint)> {
    guard_threshold(t)?;
    let hi = t.add(&ln2());
    let p = smallest_prime_in(&Bound::exp(t.clone(), true), &Bound::exp(hi, true))?
        .ok_or_else(|| Error::InvalidInput("no prime in [e^t, 2e^t]".into()))?;
    let two_p = &p * 2u32;
    let q = smallest_prime_in(&Bound::int(p.clone(), false), &Bound::int(two_p, false))?
        .ok_or_else(|| Error::InvalidInput(format!("no prime in ({p}, 2*{p})")))?;
    Ok((p, q))
}

/// Build the first `levels` levels with the smallest-prime policy.
pub fn build_tower(
    c: &LogLinear,
    n: u64,
    w: &Weight,
    levels: usize,
    opts: &BuildOptions,
) -> Result<TowerSpec> {
    if c.signum().is_le() {
        return Err(Error::InvalidInput(format!("target c = {c} must be positive")));
    }
    if n == 0 {
        return Err(Error::InvalidInput("N must be positive".into()));
    }
    let elig = w.classify_for_explicit()?;
    if !elig.slow_growth || !elig.ratio_monotone {
        return Err(Error::WeightIneligible(format!(
            "{w}: w(d) log(d)/d -> 0 {} and w(d)/d eventually non-increasing {}",
            if elig.slow_growth { "holds" } else { "fails" },
            if elig.ratio_monotone { "holds" } else { "fails" }
        )));
    }
    let d0 = elig.d0.expect("eligible weights have d0");
    let positive = elig.limit_class.positive();
    let mut spec = TowerSpec {
        c: c.clone(),
        n,
        weight: w.clone(),
        d0,
        limit_class: elig.limit_class.clone(),
        require_d_gt_n: opts.require_d_gt_n,
        levels: Vec::new(),
    };
    if levels == 0 {
        return Ok(spec);
    }

    // level 1: smallest prime d >= d0 with t_1 >= log 2
    let mut start = d0.max(2);
    if opts.require_d_gt_n {
        start = start.max(n + 1);
    }
    let mut d = next_prime(&BigUint::from(start)).to_u64().unwrap();
    let first = loop {
        if d > MAX_DEGREE_SEARCH {
            return Err(Error::N0Violation(format!(
                "no prime d_1 in [{start}, {MAX_DEGREE_SEARCH}] reaches threshold log 2"
            )));
        }
        let big_d = BigUint::from(d);
        let t = threshold(c, n, d, &big_d, w)?;
        if t.compare(&ln2())?.is_ge() {
            break (d, big_d, t);
        }
        d = next_prime(&BigUint::from(d + 1)).to_u64().unwrap();
    };
    let (d1, bd1, t1) = first;
    let (p1, q1) = find_primes(&t1)?;
    spec.levels.push(LevelRecord { i: 1, d: d1, p: p1, q: q1, big_d: bd1, threshold: t1 });

    for i in 2..=levels {
        let prev = spec.levels.last().unwrap().clone();
        let target = prev.threshold.add(&ln4());
        guard_threshold(&target)?;
        let mut d = next_prime(&BigUint::from(prev.d + 1)).to_u64().unwrap();
        let found = loop {
            if d > MAX_DEGREE_SEARCH {
                return Err(Error::BudgetExceeded(format!(
                    "no admissible d_{i} below {MAX_DEGREE_SEARCH}"
                )));
            }
            let big_d = big_d_for(positive, Some(&prev.big_d), d);
            let t = threshold(c, n, d, &big_d, w)?;
            let gap_ok = target.compare(&t)?.is_le();
            let decay_ok = positive || (gap_ok && weight_decay(w, n, &big_d, &prev.big_d, i)?);
            if gap_ok && decay_ok {
                break (d, big_d, t);
            }
            d = next_prime(&BigUint::from(d + 1)).to_u64().unwrap();
        };
        let (d, big_d, t) = found;
        let (p, q) = find_primes(&t)?;
        spec.levels.push(LevelRecord { i, d, p, q, big_d, threshold: t });
    }
    Ok(spec)
}

/// Independent recheck of the defining inequalities at one level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelReport {
    pub i: usize,
    /// `d_i`, `p_i`, `q_i` prime.
    pub primes: bool,
    /// Sequences strictly increase into this level and `p_i` is not any `q_j`.
    pub increasing: bool,
    /// `D_i` matches the limit class rule.
    pub big_d: bool,
    pub degree_floor: bool,
    pub first_threshold: bool,
    pub threshold_gap: bool,
    pub p_window: bool,
    pub q_window: bool,
    /// `None` when the weight does not tend to zero.
    pub weight_decay: Option<bool>,
}

impl LevelReport {
    pub fn all_ok(&self) -> bool {
        self.primes
            && self.increasing
            && self.big_d
            && self.degree_floor
            && self.first_threshold
            && self.threshold_gap
            && self.p_window
            && self.q_window
            && self.weight_decay.unwrap_or(true)
    }
}

/// Recheck level `i` (1-based). Thresholds are recomputed from
/// `(c, N, w, d_j)` rather than read from the record.
pub fn verify_level(spec: &TowerSpec, i: usize) -> Result<LevelReport> {
    if i == 0 || i > spec.levels.len() {
        return Err(Error::InvalidInput(format!(
            "level {i} does not exist (tower has {} levels)",
            spec.levels.len()
        )));
    }
    let positive = spec.weight.limit_class()?.positive();
    let mut big_ds = Vec::new();
    let mut acc = BigUint::one();
    for l in &spec.levels[..i] {
        acc *= l.d;
        big_ds.push(if positive { BigUint::from(l.d) } else { acc.clone() });
    }
    let t = |k: usize| threshold(&spec.c, spec.n, spec.levels[k].d, &big_ds[k], &spec.weight);
    let lvl = &spec.levels[i - 1];
    let ti = t(i - 1)?;
    let first = &spec.levels[0];

    let primes = is_prime(&BigUint::from(lvl.d)) && is_prime(&lvl.p) && is_prime(&lvl.q);
    let increasing = spec.levels[..i].windows(2).all(|w| {
        w[0].d < w[1].d && w[0].p < w[1].p && w[0].q < w[1].q
    }) && spec.levels[..i].iter().all(|l| l.q != lvl.p && l.p != lvl.q);
    let big_d = lvl.big_d == big_ds[i - 1];
    let degree_floor = first.d >= spec.d0 && (!spec.require_d_gt_n || first.d > spec.n);
    let first_threshold = t(0)?.compare(&ln2())?.is_ge();
    let threshold_gap = if i == 1 {
        true
    } else {
        t(i - 2)?.add(&ln4()).compare(&ti)?.is_le()
    };
    let log_p = Real::from(LogLinear::ln_of(&lvl.p));
    let p_window = ti.compare(&log_p)?.is_le() && log_p.compare(&ti.add(&ln2()))?.is_le();
    let q_window = lvl.p < lvl.q && lvl.q < &lvl.p * 2u32;
    let weight_decay = if positive {
        None
    } else if i == 1 {
        Some(true)
    } else {
        Some(weight_decay(&spec.weight, spec.n, &big_ds[i - 1], &big_ds[i - 2], i)?)
    };
    Ok(LevelReport { i, primes, increasing, big_d, degree_floor, first_threshold, threshold_gap, p_window, q_window, weight_decay })
}

pub fn verify_tower(spec: &TowerSpec) -> Result<Vec<LevelReport>> {
    (1..=spec.levels.len()).map(|i| verify_level(spec, i)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessVariant {
    /// `α_i^(1/N)`, for weights with positive limit.
    NthRoot,
    /// `(α_1 ⋯ α_i)^(1/N)`, for weights tending to zero.
    ProductRoot,
}

impl WitnessVariant {
    pub fn for_limit(lc: &LimitClass) -> WitnessVariant {
        if lc.positive() {
            WitnessVariant::NthRoot
        } else {
            WitnessVariant::ProductRoot
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub i: usize,
    pub variant: WitnessVariant,
    pub element: RadicalMonomial,
    #[serde(with = "crate::json::biguint")]
    pub degree: BigUint,
    pub weighted_height: Real,
}

/// `α_i = (p_i/q_i)^(1/d_i)`.
pub fn alpha(level: &LevelRecord) -> Result<RadicalMonomial> {
    RadicalMonomial::make_radical_big(&level.p, &level.q, level.d)
}

/// The witness element at level `i` and its exact weighted height.
pub fn witness(spec: &TowerSpec, i: usize, variant: WitnessVariant) -> Result<Witness> {
    if i == 0 || i > spec.levels.len() {
        return Err(Error::InvalidInput(format!("level {i} does not exist")));
    }
    let expected = WitnessVariant::for_limit(&spec.weight.limit_class()?);
    if variant != expected {
        return Err(Error::VariantMismatch(format!(
            "{variant:?} requested but the weight calls for {expected:?}"
        )));
    }
    let base = match variant {
        WitnessVariant::NthRoot => alpha(&spec.levels[i - 1])?,
        WitnessVariant::ProductRoot => {
            let mut acc = RadicalMonomial::one();
            for l in &spec.levels[..i] {
                acc = acc.multiply(&alpha(l)?);
            }
            acc
        }
    };
    let element = base.nth_root(spec.n)?;
    let degree = element.degree()?;
    let weighted_height = weighted_height(&element, &spec.weight)?;
    Ok(Witness { i, variant, element, degree, weighted_height })
}

/// `β^(1/m)` for the level witness `β`: an element of degree at most `m`
/// over the tower, used for the extension sets `L^(m)`.
pub fn extension_witness(spec: &TowerSpec, i: usize, m: u64) -> Result<Witness> {
    let variant = WitnessVariant::for_limit(&spec.weight.limit_class()?);
    let base = witness(spec, i, variant)?;
    let element = base.element.nth_root(m)?;
    let degree = element.degree()?;
    let weighted_height = weighted_height(&element, &spec.weight)?;
    Ok(Witness { i, variant, element, degree, weighted_height })
}

#[derive(Deserialize)]
struct LevelDto {
    d: u64,
    #[serde(with = "crate::json::biguint")]
    p: BigUint,
    #[serde(with = "crate::json::biguint")]
    q: BigUint,
}

#[derive(Deserialize)]
struct TowerDto {
    c: LogLinear,
    n: u64,
    weight: Weight,
    d0: u64,
    #[serde(default)]
    require_d_gt_n: bool,
    levels: Vec<LevelDto>,
}

impl TowerSpec {
    /// Load a spec from JSON. Derived fields (`D_i`, thresholds, the limit
    /// class) are recomputed rather than trusted.
    pub fn from_json(s: &str) -> Result<TowerSpec> {
        let dto: TowerDto =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("tower spec: {e}")))?;
        let limit_class = dto.weight.limit_class()?;
        let positive = limit_class.positive();
        let mut levels = Vec::new();
        let mut prev: Option<BigUint> = None;
        for (k, l) in dto.levels.into_iter().enumerate() {
            if l.d == 0 {
                return Err(Error::InvalidInput("degree d_i must be positive".into()));
            }
            let big_d = big_d_for(positive, prev.as_ref(), l.d);
            let threshold = threshold(&dto.c, dto.n, l.d, &big_d, &dto.weight)?;
            prev = Some(if positive {
                prev.unwrap_or_else(BigUint::one) * l.d
            } else {
                big_d.clone()
            });
            levels.push(LevelRecord { i: k + 1, d: l.d, p: l.p, q: l.q, big_d, threshold });
        }
        Ok(TowerSpec {
            c: dto.c,
            n: dto.n,
            weight: dto.weight,
            d0: dto.d0,
            limit_class,
            require_d_gt_n: dto.require_d_gt_n,
            levels,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tower spec serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn log2() -> LogLinear {
        LogLinear::ln_u64(2)
    }

    #[test]
    fn unweighted_log2_tower() {
        let spec = build_tower(&log2(), 1, &Weight::constant(1), 3, &BuildOptions::default()).unwrap();
        let d: Vec<u64> = spec.levels.iter().map(|l| l.d).collect();
        let p: Vec<u64> = spec.levels.iter().map(|l| l.p.to_u64().unwrap()).collect();
        let q: Vec<u64> = spec.levels.iter().map(|l| l.q.to_u64().unwrap()).collect();
        assert_eq!(d, vec![2, 5, 7]);
        assert_eq!(p, vec![5, 37, 131]);
        assert_eq!(q, vec![7, 41, 137]);
        for r in verify_tower(&spec).unwrap() {
            assert!(r.all_ok(), "{r:?}");
        }
    }

    #[test]
    fn small_target_tower() {
        let c = log2().scale(&BigRational::new(1.into(), 100.into()));
        let spec = build_tower(&c, 1, &Weight::constant(1), 1, &BuildOptions::default()).unwrap();
        let l = &spec.levels[0];
        assert_eq!((l.d, l.p.to_u64().unwrap(), l.q.to_u64().unwrap()), (101, 3, 5));
    }

    #[test]
    fn ineligible_weight_rejected() {
        let r = build_tower(&log2(), 1, &Weight::gamma(3, 2), 2, &BuildOptions::default());
        assert!(matches!(r, Err(Error::WeightIneligible(_))));
    }

    #[test]
    fn mutations_are_caught() {
        let spec = build_tower(&log2(), 1, &Weight::constant(1), 3, &BuildOptions::default()).unwrap();
        let mut bad_q = spec.clone();
        bad_q.levels[0].q = BigUint::from(11u32);
        assert!(!verify_level(&bad_q, 1).unwrap().q_window);
        let mut bad_d = spec.clone();
        bad_d.levels[1].d = 3;
        assert!(!verify_level(&bad_d, 2).unwrap().threshold_gap);
    }

    #[test]
    fn witnesses() {
        let spec = build_tower(&log2(), 1, &Weight::constant(1), 3, &BuildOptions::default()).unwrap();
        let w1 = witness(&spec, 1, WitnessVariant::NthRoot).unwrap();
        assert_eq!(w1.element, RadicalMonomial::make_radical(5, 7, 2).unwrap());
        assert_eq!(
            w1.weighted_height.as_loglinear().unwrap(),
            LogLinear::ln_u64(7).scale(&BigRational::new(1.into(), 2.into()))
        );
        let w3 = witness(&spec, 3, WitnessVariant::NthRoot).unwrap();
        assert!((w3.weighted_height.approx() - 0.7029).abs() < 1e-4);
        let w2 = witness(&spec, 2, WitnessVariant::NthRoot).unwrap();
        assert!((w2.weighted_height.approx() - 0.7428).abs() < 1e-4);
        assert!(matches!(
            witness(&spec, 1, WitnessVariant::ProductRoot),
            Err(Error::VariantMismatch(_))
        ));
    }

    #[test]
    fn json_round_trip_recomputes() {
        let spec = build_tower(&log2(), 1, &Weight::gamma(1, 2), 3, &BuildOptions::default()).unwrap();
        let back = TowerSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }
}
