//! Exact reals: log-linear values, certified comparison, primes.

pub mod interval;
pub mod loglinear;
pub mod primes;
pub mod real;

pub use interval::Interval;
pub use loglinear::LogLinear;
pub use primes::{factorize, is_prime, is_prime_u64, lower_integer, next_prime, smallest_prime_in, upper_integer, Bound};
pub use real::Real;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::Result;

/// `coeff · log(base)` in canonical form.
pub fn ll_from(coeff: &BigRational, base: &BigInt) -> Result<LogLinear> {
    LogLinear::from_coeff_base(coeff, base)
}

/// Certified ordering of two log-linear values.
pub fn ll_compare(x: &LogLinear, y: &LogLinear) -> std::cmp::Ordering {
    x.compare(y)
}
