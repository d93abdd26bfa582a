//! Shared JSON encodings for exact numbers.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::Value;

/// Rationals travel as `"num/den"` strings.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"`, `"a"` or a decimal like `"0.25"`.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == BigInt::from(0) {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| format!("bad decimal {s:?}"))?;
        let d = num_traits::pow::Pow::pow(BigInt::from(10), frac.len() as u32);
        let r = BigRational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| format!("bad rational {s:?}"))?;
    Ok(BigRational::from_integer(n))
}

/// Integers that fit in `u64` become JSON numbers, larger ones strings.
pub fn biguint_value(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(v) => Value::from(v),
        None => Value::from(n.to_string()),
    }
}

pub fn biguint_from_value(v: &Value) -> Result<BigUint, String> {
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(BigUint::from)
            .ok_or_else(|| format!("expected a non-negative integer, got {n}")),
        Value::String(s) => s.parse().map_err(|_| format!("bad integer {s:?}")),
        _ => Err(format!("expected an integer, got {v}")),
    }
}

/// `#[serde(with = "crate::json::biguint")]` for `BigUint` fields.
pub mod biguint {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        super::biguint_value(n).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        super::biguint_from_value(&v).map_err(serde::de::Error::custom)
    }
}

pub fn rational_value(r: &BigRational) -> Value {
    if r.denom().is_one() {
        if let Some(v) = r.numer().to_i64() {
            return Value::from(v);
        }
    }
    Value::from(rational_string(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(rational_string(&r), "-3/2");
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-1.5").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert!(parse_rational("1/0").is_err());
    }
}
