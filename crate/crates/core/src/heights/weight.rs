//! Weight functions `w: Z_{>0} → R_{>0}` and their classification.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exact::{LogLinear, Real};
use crate::json;

/// Behaviour of the tail of a staircase weight past its last table entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    /// Constant at the last tabulated value.
    Hold,
    /// Nothing is known past the table.
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Weight {
    Constant(BigRational),
    /// `d^γ`.
    PowerGamma(BigRational),
    /// `d^γ / log⁺ d`.
    PowerOverLog(BigRational),
    /// `d^γ · log⁺ d`.
    PowerTimesLog(BigRational),
    /// `d · (log⁺ d / log⁺ log d)^3`.
    Dobrowolski,
    /// `d / (log⁺ d)^2`.
    OverLogSquared,
    /// `d^(-d^2)`.
    InversePowerSquare,
    /// Step function: the value at the largest key `<= d` (the first value
    /// below the first key).
    Staircase { table: Vec<(u64, Real)>, tail: Tail },
}

/// Behaviour of `w(d)` as `d → ∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LimitClass {
    ToZero,
    ToPositiveFinite(Real),
    ToInfinity,
}

impl LimitClass {
    pub fn name(&self) -> &'static str {
        match self {
            LimitClass::ToZero => "ToZero",
            LimitClass::ToPositiveFinite(_) => "ToPositiveFinite",
            LimitClass::ToInfinity => "ToInfinity",
        }
    }

    /// Whether `lim w > 0`, which selects `D_i = d_i` in tower constructions.
    pub fn positive(&self) -> bool {
        !matches!(self, LimitClass::ToZero)
    }
}

impl Serialize for LimitClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(None)?;
        m.serialize_entry("class", self.name())?;
        if let LimitClass::ToPositiveFinite(v) = self {
            m.serialize_entry("value", v)?;
        }
        m.end()
    }
}

/// `lim w(Md)/w(d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "value")]
pub enum LimitRatio {
    Value(Real),
    DivergesToZero,
    NoLimit,
}

/// Eligibility of a weight for the explicit tower construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Eligibility {
    /// `w(d) log(d) / d → 0`.
    pub slow_growth: bool,
    /// `w(d)/d` eventually non-increasing.
    pub ratio_monotone: bool,
    /// Least `d0` with `w` monotone and `w(d)/d` non-increasing on `[d0, ∞)`.
    pub d0: Option<u64>,
    pub limit_class: LimitClass,
}

impl Eligibility {
    pub fn eligible(&self) -> bool {
        self.slow_growth && self.ratio_monotone && self.d0.is_some()
    }
}

/// Largest analytic threshold the discrete `d0` scan will walk down from.
const MAX_D0_SCAN: u64 = 5_000_000;

fn log_plus(d: &BigUint) -> Real {
    // log d <= 1 exactly for d <= 2
    if *d <= BigUint::from(2u32) {
        Real::one()
    } else {
        Real::from(LogLinear::ln_of(d))
    }
}

fn log_plus_log(d: &BigUint) -> Result<Real> {
    // log log d <= 1 exactly for d <= 15 < e^e
    if *d <= BigUint::from(15u32) {
        Ok(Real::one())
    } else {
        Real::from(LogLinear::ln_of(d)).ln()
    }
}

fn big_rat(d: &BigUint) -> BigRational {
    BigRational::from_integer(d.clone().into())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Up,
    Down,
    Flat,
}

impl Weight {
    pub fn constant(v: i64) -> Weight {
        Weight::Constant(BigRational::from_integer(v.into()))
    }

    pub fn gamma(n: i64, d: i64) -> Weight {
        Weight::PowerGamma(BigRational::new(n.into(), d.into()))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Weight::Constant(v) if !v.is_positive() => {
                Err(Error::InvalidInput(format!("constant weight must be positive, got {v}")))
            }
            Weight::Staircase { table, .. } => {
                if table.is_empty() {
                    return Err(Error::InvalidInput("staircase weight has an empty table".into()));
                }
                if table.windows(2).any(|w| w[0].0 >= w[1].0) || table[0].0 == 0 {
                    return Err(Error::InvalidInput(
                        "staircase keys must be positive and strictly increasing".into(),
                    ));
                }
                for (d, v) in table {
                    if v.signum()?.is_le() {
                        return Err(Error::InvalidInput(format!(
                            "staircase value at {d} must be positive"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// `w(d)`, exact where the closed form allows.
    pub fn eval(&self, d: &BigUint) -> Result<Real> {
        if d.is_zero() {
            return Err(Error::InvalidInput("weights are defined on positive integers".into()));
        }
        let dr = big_rat(d);
        match self {
            Weight::Constant(v) => Ok(Real::Rat(v.clone())),
            Weight::PowerGamma(g) => Real::pow(&dr, g),
            Weight::PowerOverLog(g) => Real::pow(&dr, g)?.div(&log_plus(d)),
            Weight::PowerTimesLog(g) => Ok(Real::pow(&dr, g)?.mul(&log_plus(d))),
            Weight::Dobrowolski => {
                let r = log_plus(d).div(&log_plus_log(d)?)?;
                Ok(Real::Rat(dr).mul(&r).mul(&r).mul(&r))
            }
            Weight::OverLogSquared => {
                let l = log_plus(d);
                Real::Rat(dr).div(&l.mul(&l))
            }
            Weight::InversePowerSquare => {
                let e = -(big_rat(d) * big_rat(d));
                Real::pow(&dr, &e)
            }
            Weight::Staircase { table, .. } => {
                let dv = d.to_u64().unwrap_or(u64::MAX);
                let v = table
                    .iter()
                    .rev()
                    .find(|(k, _)| *k <= dv)
                    .unwrap_or(&table[0]);
                Ok(v.1.clone())
            }
        }
    }

    pub fn eval_u64(&self, d: u64) -> Result<Real> {
        self.eval(&BigUint::from(d))
    }

    pub fn limit_class(&self) -> Result<LimitClass> {
        use LimitClass::*;
        Ok(match self {
            Weight::Constant(v) => ToPositiveFinite(Real::Rat(v.clone())),
            Weight::PowerGamma(g) => {
                if g.is_positive() {
                    ToInfinity
                } else if g.is_zero() {
                    ToPositiveFinite(Real::one())
                } else {
                    ToZero
                }
            }
            Weight::PowerOverLog(g) => {
                if g.is_positive() {
                    ToInfinity
                } else {
                    ToZero
                }
            }
            Weight::PowerTimesLog(g) => {
                if g.is_negative() {
                    ToZero
                } else {
                    ToInfinity
                }
            }
            Weight::Dobrowolski | Weight::OverLogSquared => ToInfinity,
            Weight::InversePowerSquare => ToZero,
            Weight::Staircase { table, tail } => match tail {
                Tail::Hold => ToPositiveFinite(table.last().unwrap().1.clone()),
                Tail::Unknown => {
                    return Err(Error::Undecidable(
                        "staircase weight has no tail rule".into(),
                    ))
                }
            },
        })
    }

    /// `l_w(M) = lim w(Md)/w(d)`.
    pub fn l_w(&self, m: u64) -> Result<LimitRatio> {
        if m == 0 {
            return Err(Error::InvalidInput("M must be positive".into()));
        }
        let mr = BigRational::from_integer(m.into());
        Ok(match self {
            Weight::Constant(_) => LimitRatio::Value(Real::one()),
            Weight::PowerGamma(g) | Weight::PowerOverLog(g) | Weight::PowerTimesLog(g) => {
                LimitRatio::Value(Real::pow(&mr, g)?)
            }
            Weight::Dobrowolski | Weight::OverLogSquared => LimitRatio::Value(Real::Rat(mr)),
            Weight::InversePowerSquare => {
                if m == 1 {
                    LimitRatio::Value(Real::one())
                } else {
                    LimitRatio::DivergesToZero
                }
            }
            Weight::Staircase { tail, .. } => match tail {
                Tail::Hold => LimitRatio::Value(Real::one()),
                Tail::Unknown => LimitRatio::NoLimit,
            },
        })
    }

    /// Growth and monotonicity requirements of the tower construction, the least `d0`,
    /// and the limit class.
    pub fn classify_for_explicit(&self) -> Result<Eligibility> {
        let limit_class = self.limit_class()?;
        let one = BigRational::one();
        let (slow_growth, ratio_monotone) = match self {
            Weight::Constant(_) | Weight::OverLogSquared | Weight::InversePowerSquare => (true, true),
            Weight::PowerGamma(g) | Weight::PowerOverLog(g) => (*g < one, *g <= one),
            Weight::PowerTimesLog(g) => (*g < one, *g < one),
            Weight::Dobrowolski => (false, false),
            Weight::Staircase { .. } => (true, true),
        };
        let d0 = if ratio_monotone { Some(self.least_d0()?) } else { None };
        Ok(Eligibility { slow_growth, ratio_monotone, d0, limit_class })
    }

    /// Analytic threshold past which `w` is monotone in `dir` and `w(d)/d`
    /// is non-increasing.
    fn tail_threshold(&self) -> Result<(u64, Direction)> {
        let exp_ceil = |x: f64| -> Result<u64> {
            let v = x.exp().ceil();
            if v.is_finite() && v < MAX_D0_SCAN as f64 {
                Ok(v as u64)
            } else {
                Err(Error::BudgetExceeded(format!(
                    "monotonicity threshold e^{x:.3} is beyond the scan limit"
                )))
            }
        };
        let f = |g: &BigRational| g.to_f64().unwrap_or(f64::NAN);
        Ok(match self {
            Weight::Constant(_) => (1, Direction::Flat),
            Weight::PowerGamma(g) => {
                let dir = if g.is_positive() {
                    Direction::Up
                } else if g.is_zero() {
                    Direction::Flat
                } else {
                    Direction::Down
                };
                (1, dir)
            }
            Weight::PowerOverLog(g) => {
                if g.is_positive() {
                    (exp_ceil(1.0 / f(g))?.max(3), Direction::Up)
                } else {
                    (3, Direction::Down)
                }
            }
            Weight::PowerTimesLog(g) => {
                if g.is_negative() {
                    (exp_ceil(-1.0 / f(g))?.max(3), Direction::Down)
                } else {
                    (exp_ceil(1.0 / (1.0 - f(g)))?.max(3), Direction::Up)
                }
            }
            Weight::OverLogSquared => (8, Direction::Up),
            Weight::InversePowerSquare => (1, Direction::Down),
            Weight::Dobrowolski => (16, Direction::Up),
            Weight::Staircase { table, .. } => {
                let last = table.last().unwrap().0;
                (last, Direction::Flat)
            }
        })
    }

    fn least_d0(&self) -> Result<u64> {
        let (t, dir) = self.tail_threshold()?;
        let mut allowed = match dir {
            Direction::Flat => None,
            other => Some(other),
        };
        let mut d = t;
        while d > 1 {
            let a = self.eval_u64(d - 1)?;
            let b = self.eval_u64(d)?;
            let step = match a.compare(&b)? {
                std::cmp::Ordering::Less => Direction::Up,
                std::cmp::Ordering::Greater => Direction::Down,
                std::cmp::Ordering::Equal => Direction::Flat,
            };
            let monotone = match (step, allowed) {
                (Direction::Flat, _) => true,
                (s, None) => {
                    allowed = Some(s);
                    true
                }
                (s, Some(al)) => s == al,
            };
            // w(d-1)/(d-1) >= w(d)/d
            let ratio_ok = a
                .mul(&Real::from(d))
                .compare(&b.mul(&Real::from(d - 1)))?
                .is_ge();
            if !monotone || !ratio_ok {
                return Ok(d);
            }
            d -= 1;
        }
        Ok(1)
    }

    /// `inf { w(d) : lo <= d <= hi }`.
    pub fn inf_over(&self, lo: &BigUint, hi: &BigUint) -> Result<Real> {
        if lo.is_zero() || lo > hi {
            return Err(Error::InvalidInput(format!("empty degree range [{lo}, {hi}]")));
        }
        if let Weight::Staircase { table, .. } = self {
            let mut best = self.eval(lo)?;
            for (k, v) in table {
                let k = BigUint::from(*k);
                if &k > lo && &k <= hi {
                    best = best.min(v);
                }
            }
            return Ok(best);
        }
        let (t, dir) = self.tail_threshold()?;
        let t = BigUint::from(t);
        let mut best: Option<Real> = None;
        let mut take = |v: Real| {
            best = Some(match best.take() {
                Some(b) => b.min(&v),
                None => v,
            })
        };
        // below the monotone range, scan directly
        let mut d = lo.clone();
        while d < t && &d <= hi {
            take(self.eval(&d)?);
            d += 1u32;
        }
        if &d <= hi {
            take(match dir {
                Direction::Down => self.eval(hi)?,
                Direction::Up | Direction::Flat => self.eval(&d)?,
            });
        }
        Ok(best.expect("range is nonempty"))
    }

    /// Short form used on the command line, e.g. `gamma:1/2`.
    pub fn spec_string(&self) -> String {
        match self {
            Weight::Constant(v) => format!("const:{v}"),
            Weight::PowerGamma(g) => format!("gamma:{g}"),
            Weight::PowerOverLog(g) => format!("power-over-log:{g}"),
            Weight::PowerTimesLog(g) => format!("power-times-log:{g}"),
            Weight::Dobrowolski => "dobrowolski".into(),
            Weight::OverLogSquared => "over-log-squared".into(),
            Weight::InversePowerSquare => "inverse-power-square".into(),
            Weight::Staircase { table, .. } => format!("staircase[{} steps]", table.len()),
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.spec_string())
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Weight> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let rat = |a: Option<&str>| -> Result<BigRational> {
            let a = a.ok_or_else(|| Error::InvalidInput(format!("weight {kind:?} needs a parameter")))?;
            json::parse_rational(a).map_err(Error::InvalidInput)
        };
        let w = match kind {
            "const" | "constant" => Weight::Constant(rat(arg)?),
            "gamma" | "power" => Weight::PowerGamma(rat(arg)?),
            "power-over-log" => Weight::PowerOverLog(rat(arg)?),
            "power-times-log" => Weight::PowerTimesLog(rat(arg)?),
            "dobrowolski" => Weight::Dobrowolski,
            "over-log-squared" => Weight::OverLogSquared,
            "inverse-power-square" => Weight::InversePowerSquare,
            other => return Err(Error::InvalidInput(format!("unknown weight kind {other:?}"))),
        };
        w.validate()?;
        Ok(w)
    }
}

#[derive(Serialize, Deserialize)]
struct WeightDto {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<Vec<(u64, serde_json::Value)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<Tail>,
}

fn real_from_json(v: &serde_json::Value) -> std::result::Result<Real, String> {
    match v {
        serde_json::Value::String(s) => json::parse_rational(s).map(Real::Rat),
        serde_json::Value::Number(_) => json::parse_rational(&v.to_string()).map(Real::Rat),
        serde_json::Value::Object(o) if o.contains_key("terms") => {
            serde_json::from_value::<LogLinear>(v.clone())
                .map(Real::from)
                .map_err(|e| e.to_string())
        }
        _ => Err(format!("cannot read an exact value from {v}")),
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut dto = WeightDto { kind: String::new(), value: None, gamma: None, table: None, tail: None };
        match self {
            Weight::Constant(v) => {
                dto.kind = "constant".into();
                dto.value = Some(json::rational_string(v));
            }
            Weight::PowerGamma(g) => {
                dto.kind = "power_gamma".into();
                dto.gamma = Some(json::rational_string(g));
            }
            Weight::PowerOverLog(g) => {
                dto.kind = "power_over_log".into();
                dto.gamma = Some(json::rational_string(g));
            }
            Weight::PowerTimesLog(g) => {
                dto.kind = "power_times_log".into();
                dto.gamma = Some(json::rational_string(g));
            }
            Weight::Dobrowolski => dto.kind = "dobrowolski".into(),
            Weight::OverLogSquared => dto.kind = "over_log_squared".into(),
            Weight::InversePowerSquare => dto.kind = "inverse_power_square".into(),
            Weight::Staircase { table, tail } => {
                dto.kind = "staircase".into();
                dto.table = Some(
                    table
                        .iter()
                        .map(|(d, v)| (*d, serde_json::to_value(v).unwrap_or_default()))
                        .collect(),
                );
                dto.tail = Some(tail.clone());
            }
        }
        dto.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = WeightDto::deserialize(d)?;
        let gamma = || -> std::result::Result<BigRational, D::Error> {
            let g = dto.gamma.as_deref().ok_or_else(|| D::Error::custom("missing gamma"))?;
            json::parse_rational(g).map_err(D::Error::custom)
        };
        let w = match dto.kind.as_str() {
            "constant" => {
                let v = dto.value.as_deref().ok_or_else(|| D::Error::custom("missing value"))?;
                Weight::Constant(json::parse_rational(v).map_err(D::Error::custom)?)
            }
            "power_gamma" => Weight::PowerGamma(gamma()?),
            "power_over_log" => Weight::PowerOverLog(gamma()?),
            "power_times_log" => Weight::PowerTimesLog(gamma()?),
            "dobrowolski" => Weight::Dobrowolski,
            "over_log_squared" => Weight::OverLogSquared,
            "inverse_power_square" => Weight::InversePowerSquare,
            "staircase" => {
                let table = dto
                    .table
                    .as_ref()
                    .ok_or_else(|| D::Error::custom("missing table"))?
                    .iter()
                    .map(|(k, v)| real_from_json(v).map(|r| (*k, r)))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(D::Error::custom)?;
                Weight::Staircase { table, tail: dto.tail.clone().unwrap_or(Tail::Unknown) }
            }
            other => return Err(D::Error::custom(format!("unknown weight kind {other:?}"))),
        };
        w.validate().map_err(D::Error::custom)?;
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        assert_eq!(Weight::Dobrowolski.eval_u64(2).unwrap(), Real::from(2u64));
        assert_eq!(Weight::gamma(1, 2).eval_u64(4).unwrap(), Real::from(2u64));
        assert_eq!(Weight::constant(1).eval_u64(12345).unwrap(), Real::one());
        let v = Weight::OverLogSquared.eval_u64(100).unwrap().approx();
        assert!((v - 100.0 / 100f64.ln().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn limit_ratios() {
        assert_eq!(Weight::gamma(1, 2).l_w(4).unwrap(), LimitRatio::Value(Real::from(2u64)));
        assert_eq!(Weight::constant(1).l_w(7).unwrap(), LimitRatio::Value(Real::one()));
        assert_eq!(Weight::InversePowerSquare.l_w(2).unwrap(), LimitRatio::DivergesToZero);
    }

    #[test]
    fn eligibility_examples() {
        let e = Weight::gamma(1, 2).classify_for_explicit().unwrap();
        assert!(e.slow_growth && e.ratio_monotone);
        assert_eq!(e.d0, Some(1));
        assert_eq!(e.limit_class, LimitClass::ToInfinity);
        let dob = Weight::Dobrowolski.classify_for_explicit().unwrap();
        assert!(!dob.slow_growth);
        let one = Weight::constant(1).classify_for_explicit().unwrap();
        assert_eq!((one.slow_growth, one.ratio_monotone, one.d0), (true, true, Some(1)));
        assert_eq!(one.limit_class, LimitClass::ToPositiveFinite(Real::one()));
        let ols = Weight::OverLogSquared.classify_for_explicit().unwrap();
        assert_eq!(ols.d0, Some(7));
        let stair = Weight::Staircase { table: vec![(1, Real::one())], tail: Tail::Unknown };
        assert!(matches!(stair.classify_for_explicit(), Err(Error::Undecidable(_))));
    }

    #[test]
    fn d0_matches_brute_force_scan() {
        for w in [
            Weight::PowerOverLog(BigRational::new(1.into(), 2.into())),
            Weight::PowerTimesLog(BigRational::new(1.into(), 3.into())),
            Weight::PowerTimesLog(BigRational::new((-1).into(), 2.into())),
            Weight::OverLogSquared,
        ] {
            let d0 = w.classify_for_explicit().unwrap().d0.unwrap();
            let vals: Vec<f64> = (1..400).map(|d| w.eval_u64(d).unwrap().approx()).collect();
            // from d0 on, one direction and w/d non-increasing
            let from = (d0 - 1) as usize;
            let tail = &vals[from..];
            let up = tail.windows(2).all(|p| p[0] <= p[1] + 1e-12);
            let down = tail.windows(2).all(|p| p[0] + 1e-12 >= p[1]);
            assert!(up || down, "{w}");
            for i in from..vals.len() - 1 {
                assert!(vals[i] / (i + 1) as f64 + 1e-12 >= vals[i + 1] / (i + 2) as f64, "{w} at {i}");
            }
            if d0 > 1 {
                let before = &vals[from - 1..];
                let up = before.windows(2).all(|p| p[0] <= p[1]);
                let down = before.windows(2).all(|p| p[0] >= p[1]);
                let ratio = (from - 1..vals.len() - 1)
                    .all(|i| vals[i] / (i + 1) as f64 >= vals[i + 1] / (i + 2) as f64);
                assert!(!((up || down) && ratio), "{w}: d0 = {d0} is not least");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for w in [Weight::gamma(1, 2), Weight::constant(3), Weight::Dobrowolski] {
            let s = serde_json::to_string(&w).unwrap();
            let back: Weight = serde_json::from_str(&s).unwrap();
            assert_eq!(back, w);
        }
        let w: Weight = "power-over-log:1/3".parse().unwrap();
        assert_eq!(w, Weight::PowerOverLog(BigRational::new(1.into(), 3.into())));
    }
}
