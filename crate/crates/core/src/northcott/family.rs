//! Staircase weights that normalise a family of algebraic numbers.
//!
//! Given samples `(deg a, h(a))`, the weight `w(d) = 1/h(a_d)` built from
//! the per-degree minima makes every sample satisfy `h^w(a) >= 1`, with
//! equality on the minimising elements. Only the supplied finite
//! truncation of the family is seen.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{LogLinear, Real};
use crate::heights::{Tail, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyCase {
    /// Heights grow with the degree; the plain Northcott number is infinite.
    NorInfinite,
    /// Heights shrink towards zero; the plain Northcott number is zero.
    NorZero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilySample {
    pub degree: u64,
    pub height: LogLinear,
    pub weighted: Real,
    /// The sample attains the per-degree minimum.
    pub defining: bool,
    pub at_least_one: bool,
    pub equals_one: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyWeight {
    pub case: FamilyCase,
    pub weight: Weight,
    pub samples: Vec<FamilySample>,
    /// Every sample has `h^w >= 1` and the defining ones have `h^w = 1`.
    pub verified: bool,
}

pub fn weight_from_family(samples: &[(u64, LogLinear)], case: FamilyCase) -> Result<FamilyWeight> {
    let mut minima: BTreeMap<u64, LogLinear> = BTreeMap::new();
    for (d, h) in samples {
        if *d == 0 {
            return Err(Error::InvalidInput("sample degrees must be positive".into()));
        }
        if h.signum().is_le() {
            return Err(Error::InvalidInput(format!(
                "sample of degree {d} has height {h}; torsion points cannot be normalised"
            )));
        }
        minima
            .entry(*d)
            .and_modify(|m| {
                if h < m {
                    *m = h.clone()
                }
            })
            .or_insert_with(|| h.clone());
    }
    if minima.len() < 2 {
        return Err(Error::DegreesBounded(format!(
            "samples span {} degree(s); the construction needs unbounded degrees",
            minima.len()
        )));
    }
    let mins: Vec<(&u64, &LogLinear)> = minima.iter().collect();
    for w in mins.windows(2) {
        let (d0, h0) = w[0];
        let (d1, h1) = w[1];
        let ok = match case {
            FamilyCase::NorInfinite => h0 <= h1,
            FamilyCase::NorZero => h0 >= h1,
        };
        if !ok {
            return Err(Error::InvalidInput(format!(
                "per-degree minimal heights at degrees {d0} and {d1} are not {}",
                match case {
                    FamilyCase::NorInfinite => "non-decreasing",
                    FamilyCase::NorZero => "non-increasing",
                }
            )));
        }
    }

    let mut table: Vec<(u64, Real)> = Vec::new();
    let least = *mins[0].0;
    if case == FamilyCase::NorZero && least > 1 {
        table.push((1, Real::one()));
    }
    for (d, h) in &minima {
        table.push((*d, Real::from(h.clone()).recip()?));
    }
    let weight = Weight::Staircase { table, tail: Tail::Unknown };
    weight.validate()?;

    let one = Real::one();
    let mut out = Vec::with_capacity(samples.len());
    let mut verified = true;
    for (d, h) in samples {
        let weighted = weight.eval_u64(*d)?.mul(&Real::from(h.clone()));
        let cmp = weighted.compare(&one)?;
        let defining = minima[d] == *h;
        let at_least_one = cmp.is_ge();
        let equals_one = cmp.is_eq();
        verified &= at_least_one && (!defining || equals_one);
        out.push(FamilySample { degree: *d, height: h.clone(), weighted, defining, at_least_one, equals_one });
    }
    Ok(FamilyWeight { case, weight, samples: out, verified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn roots_of_two() {
        // h(2^(1/d)) = log 2 / d
        let samples: Vec<(u64, LogLinear)> =
            (1..=12).map(|d| (d, LogLinear::ln_u64(2).scale(&rat(1, d as i64)))).collect();
        let fw = weight_from_family(&samples, FamilyCase::NorZero).unwrap();
        assert!(fw.verified);
        assert!(fw.samples.iter().all(|s| s.equals_one));
        let w7 = fw.weight.eval_u64(7).unwrap();
        assert_eq!(w7.compare(&Real::from(7u64).div(&Real::from(LogLinear::ln_u64(2))).unwrap()).unwrap(), std::cmp::Ordering::Equal);
    }

    #[test]
    fn growing_family() {
        // h(d 2^(1/d)) = log d + log 2 / d
        let samples: Vec<(u64, LogLinear)> = (2..=10)
            .map(|d| {
                (d, &LogLinear::ln_u64(d) + &LogLinear::ln_u64(2).scale(&rat(1, d as i64)))
            })
            .collect();
        let fw = weight_from_family(&samples, FamilyCase::NorInfinite).unwrap();
        assert!(fw.verified);
        assert!(fw.samples.iter().all(|s| s.defining && s.equals_one));
    }

    #[test]
    fn bounded_degrees() {
        let samples = vec![(5, LogLinear::ln_u64(2)), (5, LogLinear::ln_u64(3))];
        assert!(matches!(
            weight_from_family(&samples, FamilyCase::NorZero),
            Err(Error::DegreesBounded(_))
        ));
    }
}
