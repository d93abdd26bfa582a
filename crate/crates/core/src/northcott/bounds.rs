//! Lower bounds from discriminant bookkeeping and the two-sided bracket.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{LogLinear, Real};
use crate::heights::LimitClass;
use crate::tower::{witness, TowerSpec, WitnessVariant};

fn rat(n: u64, d: u64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// `h(a) >= (1/(2(m-1))) (log N(D)/(m · deg_base) - log m)` for `a` of
/// degree `m` over a base field of degree `deg_base`. The value may be
/// negative, in which case the bound says nothing.
pub fn silverman_lower_bound(m: u64, log_norm_disc: &LogLinear, deg_base: u64) -> Result<LogLinear> {
    if m < 2 {
        return Err(Error::InvalidDegree(m));
    }
    if deg_base == 0 {
        return Err(Error::InvalidInput("base degree must be positive".into()));
    }
    if log_norm_disc.signum().is_lt() {
        return Err(Error::InvalidInput(format!(
            "log of a discriminant norm cannot be negative, got {log_norm_disc}"
        )));
    }
    let inner = log_norm_disc.scale(&rat(1, m * deg_base)) - LogLinear::ln_u64(m);
    Ok(inner.scale(&rat(1, 2 * (m - 1))))
}

/// Lower bounds on the exponents of primes dividing a discriminant norm.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DiscriminantLedger {
    pub exponents: BTreeMap<BigUint, BigUint>,
}

impl DiscriminantLedger {
    pub fn exponent(&self, p: &BigUint) -> BigUint {
        self.exponents.get(p).cloned().unwrap_or_else(BigUint::zero)
    }

    /// `Σ e_p log p`.
    pub fn log_norm(&self) -> LogLinear {
        LogLinear::from_terms(
            self.exponents
                .iter()
                .map(|(p, e)| (p.clone(), BigRational::from_integer(e.clone().into()))),
        )
    }
}

impl Serialize for DiscriminantLedger {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let m: BTreeMap<String, serde_json::Value> = self
            .exponents
            .iter()
            .map(|(p, e)| (p.to_string(), crate::json::biguint_value(e)))
            .collect();
        m.serialize(s)
    }
}

fn check_level(spec: &TowerSpec, i: usize) -> Result<()> {
    if i == 0 || i > spec.levels.len() {
        return Err(Error::InvalidInput(format!(
            "level {i} does not exist (tower has {} levels)",
            spec.levels.len()
        )));
    }
    Ok(())
}

/// `[K_(i-1) : Q] = d_1 ⋯ d_(i-1)`.
fn base_degree(spec: &TowerSpec, i: usize) -> BigUint {
    spec.levels[..i - 1].iter().fold(BigUint::one(), |acc, l| acc * l.d)
}

/// `p_i` and `q_i` ramify totally in `K_i / K_(i-1)`, so each appears in the
/// discriminant norm of a degree-`s` piece with exponent at least
/// `[K_(i-1):Q] (d_i - 1) s`.
pub fn ramification_exponent(spec: &TowerSpec, i: usize, s: u64) -> Result<DiscriminantLedger> {
    check_level(spec, i)?;
    let l = &spec.levels[i - 1];
    let e = base_degree(spec, i) * (l.d - 1) * s;
    let mut exponents = BTreeMap::new();
    exponents.insert(l.p.clone(), e.clone());
    exponents.insert(l.q.clone(), e);
    Ok(DiscriminantLedger { exponents })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub i: usize,
    pub s: u64,
    /// Bound on `h(a)`.
    pub unweighted: Real,
    /// Lower bound for `w(deg a)` used to pass to `h^w`.
    pub weight_factor: Real,
    /// Bound on `h^w(a)`.
    pub weighted: Real,
}

/// Bounds for `a ∈ K_i^(N) \ K_(i-1)^(N)` with `[K_(i-1)(a) : K_(i-1)] = s d_i`:
/// `h(a) > (2N(d_i - 1) c / w(N D_i) - log(s d_i)) / (2(s d_i - 1))`.
pub fn tower_lower_bound(spec: &TowerSpec, i: usize, s: u64) -> Result<LowerBound> {
    check_level(spec, i)?;
    let n = spec.n;
    if s == 0 || s > n {
        return Err(Error::InvalidInput(format!("s = {s} must lie in [1, {n}]")));
    }
    let l = &spec.levels[i - 1];
    if l.d <= n {
        return Err(Error::DichotomyUnavailable(format!(
            "d_{i} = {} does not exceed N = {n}",
            l.d
        )));
    }
    let w = &spec.weight;
    let nbd = BigUint::from(n) * &l.big_d;
    let lead = Real::from(spec.c.scale(&BigRational::from_integer((2 * n * (l.d - 1)).into())))
        .div(&w.eval(&nbd)?)?;
    let sd = s * l.d;
    let unweighted = lead
        .sub(&Real::from(LogLinear::ln_u64(sd)))
        .mul(&Real::Rat(rat(1, 2 * (sd - 1))));
    let weight_factor = match spec.limit_class {
        LimitClass::ToPositiveFinite(_) => {
            let full: BigUint = spec.levels[..i].iter().fold(BigUint::one(), |acc, l| acc * l.d);
            w.inf_over(&BigUint::from(sd), &(full * s))?
        }
        LimitClass::ToZero | LimitClass::ToInfinity => w.eval(&(&l.big_d * s))?,
    };
    let weighted = unweighted.mul(&weight_factor);
    Ok(LowerBound { i, s, unweighted, weight_factor, weighted })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BracketLevel {
    pub i: usize,
    pub d: u64,
    #[serde(with = "crate::json::biguint")]
    pub p: BigUint,
    #[serde(with = "crate::json::biguint")]
    pub q: BigUint,
    /// `min_s` of the weighted lower bounds; absent when `d_i <= N`.
    pub lower: Option<Real>,
    /// Weighted height of the level witness.
    pub upper: Real,
    /// `min_(j >= i) lower_j` over the computed levels.
    pub lower_envelope: Option<Real>,
    /// `max_(j >= i) upper_j` over the computed levels.
    pub upper_envelope: Real,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NorBracket {
    pub c: LogLinear,
    pub levels: Vec<BracketLevel>,
    pub lower: Real,
    pub upper: Real,
}

fn level_lower(spec: &TowerSpec, i: usize) -> Result<Option<Real>> {
    if spec.levels[i - 1].d <= spec.n {
        return Ok(None);
    }
    let mut best: Option<Real> = None;
    for s in 1..=spec.n {
        let b = tower_lower_bound(spec, i, s)?.weighted;
        best = Some(match best {
            Some(x) => x.min(&b),
            None => b,
        });
    }
    Ok(best)
}

/// Lower and upper estimates for the Northcott number over the first
/// `levels` levels of the tower.
pub fn northcott_bracket(spec: &TowerSpec, levels: usize) -> Result<NorBracket> {
    if levels == 0 || levels > spec.levels.len() {
        return Err(Error::InvalidInput(format!(
            "requested {levels} levels from a tower with {}",
            spec.levels.len()
        )));
    }
    if spec.levels[..levels].iter().all(|l| l.d <= spec.n) {
        return Err(Error::DichotomyUnavailable(format!(
            "no computed level has d_i > N = {}",
            spec.n
        )));
    }
    let variant = WitnessVariant::for_limit(&spec.limit_class);
    let rows: Vec<(Option<Real>, Real)> = (1..=levels)
        .into_par_iter()
        .map(|i| Ok((level_lower(spec, i)?, witness(spec, i, variant)?.weighted_height)))
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(levels);
    let mut low_env: Option<Real> = None;
    let mut up_env: Option<Real> = None;
    for (k, (lower, upper)) in rows.into_iter().enumerate().rev() {
        if let Some(l) = &lower {
            low_env = Some(match low_env {
                Some(e) => e.min(l),
                None => l.clone(),
            });
        }
        up_env = Some(match up_env {
            Some(e) => e.max(&upper),
            None => upper.clone(),
        });
        let l = &spec.levels[k];
        out.push(BracketLevel {
            i: k + 1,
            d: l.d,
            p: l.p.clone(),
            q: l.q.clone(),
            lower,
            upper,
            lower_envelope: low_env.clone(),
            upper_envelope: up_env.clone().unwrap(),
        });
    }
    out.reverse();
    let last = out.last().unwrap();
    let lower = last.lower_envelope.clone().expect("some level has d_i > N");
    let upper = last.upper_envelope.clone();
    Ok(NorBracket { c: spec.c.clone(), levels: out, lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heights::Weight;
    use crate::tower::{build_tower, BuildOptions};

    fn log2_spec(levels: usize) -> TowerSpec {
        build_tower(&LogLinear::ln_u64(2), 1, &Weight::constant(1), levels, &BuildOptions::default())
            .unwrap()
    }

    #[test]
    fn silverman_values() {
        let b = silverman_lower_bound(2, &LogLinear::ln_u64(35), 1).unwrap();
        assert!((b.approx() - 0.5423).abs() < 1e-4);
        let z = silverman_lower_bound(2, &LogLinear::zero(), 1).unwrap();
        assert_eq!(z, -LogLinear::ln_u64(2).scale(&rat(1, 2)));
        let t = silverman_lower_bound(3, &LogLinear::ln_u64(1000).scale(&rat(3, 1)), 1).unwrap();
        assert!((t.approx() - 1.452).abs() < 1e-3);
        assert!(matches!(silverman_lower_bound(1, &LogLinear::zero(), 1), Err(Error::InvalidDegree(1))));
    }

    #[test]
    fn ledgers() {
        let spec = log2_spec(3);
        let l1 = ramification_exponent(&spec, 1, 1).unwrap();
        assert_eq!(l1.exponent(&5u32.into()), 1u32.into());
        assert_eq!(l1.exponent(&7u32.into()), 1u32.into());
        let l2 = ramification_exponent(&spec, 2, 1).unwrap();
        assert_eq!(l2.exponent(&37u32.into()), 8u32.into());
        let l3 = ramification_exponent(&spec, 3, 2).unwrap();
        assert_eq!(l3.exponent(&131u32.into()), 120u32.into());
        assert_eq!(l3.exponent(&137u32.into()), 120u32.into());
    }

    #[test]
    fn lower_bounds_w1() {
        let spec = log2_spec(3);
        let l2 = LogLinear::ln_u64(2);
        let b1 = tower_lower_bound(&spec, 1, 1).unwrap();
        assert_eq!(b1.weighted.as_loglinear().unwrap(), l2.scale(&rat(1, 2)));
        let b3 = tower_lower_bound(&spec, 3, 1).unwrap();
        assert_eq!(b3.weighted.as_loglinear().unwrap(), &l2 - &LogLinear::ln_u64(7).scale(&rat(1, 12)));
        let b2 = tower_lower_bound(&spec, 2, 1).unwrap();
        assert_eq!(b2.weighted.as_loglinear().unwrap(), &l2 - &LogLinear::ln_u64(5).scale(&rat(1, 8)));
    }

    #[test]
    fn bracket_w1() {
        let spec = log2_spec(3);
        let b = northcott_bracket(&spec, 3).unwrap();
        let lows: Vec<f64> = b.levels.iter().map(|l| l.lower.as_ref().unwrap().approx()).collect();
        let ups: Vec<f64> = b.levels.iter().map(|l| l.upper.approx()).collect();
        for (x, y) in lows.iter().zip([0.3466, 0.4919, 0.5310]) {
            assert!((x - y).abs() < 1e-4);
        }
        for (x, y) in ups.iter().zip([0.9730, 0.7428, 0.7029]) {
            assert!((x - y).abs() < 1e-4);
        }
        let c = Real::from(LogLinear::ln_u64(2));
        assert!(b.lower.compare(&c).unwrap().is_lt());
        assert!(c.compare(&b.upper).unwrap().is_lt());
    }

    #[test]
    fn dichotomy_needs_d_above_n() {
        let spec = build_tower(&LogLinear::ln_u64(2), 3, &Weight::constant(1), 1, &BuildOptions::default())
            .unwrap();
        assert!(spec.levels[0].d <= 3);
        assert!(matches!(northcott_bracket(&spec, 1), Err(Error::DichotomyUnavailable(_))));
    }
}
