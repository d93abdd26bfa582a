//! Exact weighted Weil heights, Kummer towers with prescribed Northcott
//! number, and height witnesses for structured matrices.

pub mod algebraic;
pub mod error;
pub mod exact;
pub mod group;
pub mod heights;
pub mod json;
pub mod matrix;
pub mod northcott;
pub mod selftest;
pub mod tower;

pub use error::{Error, ErrorClass, Result};
pub use exact::{LogLinear, Real};
