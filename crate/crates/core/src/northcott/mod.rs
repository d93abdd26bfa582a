//! Two-sided estimates of Northcott numbers, bounded-height enumeration and
//! weights built from families.

pub mod bounds;
pub mod enumerate;
pub mod family;

pub use bounds::{
    northcott_bracket, ramification_exponent, silverman_lower_bound, tower_lower_bound,
    BracketLevel, DiscriminantLedger, LowerBound, NorBracket,
};
pub use enumerate::{enumerate_bounded, is_irreducible_small, EnumeratedPoly, Enumeration};
pub use family::{weight_from_family, FamilyCase, FamilySample, FamilyWeight};
