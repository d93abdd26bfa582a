//! Radical monomials, integer polynomials and Mahler measure.

pub mod degree;
pub mod mahler;
pub mod poly;
pub mod radical;

pub use degree::{field_degree, monomial_degree, tuple_degree};
pub use mahler::{mahler_measure, MahlerEstimate};
pub use poly::IntPolynomial;
pub use radical::{RadicalFactor, RadicalMonomial};
