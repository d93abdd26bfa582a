use thiserror::Error;

/// Every failure the library reports.
///
/// Variants split into three groups the CLI maps to exit codes:
/// usage/input problems, precondition violations, and exhausted budgets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid logarithm base {0}")]
    InvalidBase(String),
    #[error("degenerate radical: p and q coincide ({0})")]
    DegenerateRadical(String),
    #[error("root of a number with nontrivial root-of-unity part is ambiguous")]
    AmbiguousRoot,
    #[error("unsupported product: {0}")]
    UnsupportedProduct(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid tuple: {0}")]
    InvalidTuple(String),
    #[error("root isolation could not be certified: {0}")]
    NotCertified(String),
    #[error("undecidable: {0}")]
    Undecidable(String),
    #[error("weight is ineligible: {0}")]
    WeightIneligible(String),
    #[error("no admissible first degree: {0}")]
    N0Violation(String),
    #[error("witness variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("invalid degree {0}: need at least 2")]
    InvalidDegree(u64),
    #[error("dichotomy unavailable: {0}")]
    DichotomyUnavailable(String),
    #[error("degrees are bounded: {0}")]
    DegreesBounded(String),
    #[error("unsupported group parameter d = {0}: need an odd prime at most 31")]
    UnsupportedD(u64),
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error("comparison undecided at {0} bits")]
    Undecided(u32),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Precondition,
    Budget,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            InvalidBase(_) | InvalidInput(_) | InvalidTuple(_) | DegenerateRadical(_) => {
                ErrorClass::Usage
            }
            BudgetExceeded(_) | Undecided(_) => ErrorClass::Budget,
            _ => ErrorClass::Precondition,
        }
    }

    /// Stable identifier used in machine-readable error reports.
    pub fn kind(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidBase(_) => "InvalidBase",
            DegenerateRadical(_) => "DegenerateRadical",
            AmbiguousRoot => "AmbiguousRoot",
            UnsupportedProduct(_) => "UnsupportedProduct",
            InvalidInput(_) => "InvalidInput",
            InvalidTuple(_) => "InvalidTuple",
            NotCertified(_) => "NotCertified",
            Undecidable(_) => "Undecidable",
            WeightIneligible(_) => "WeightIneligible",
            N0Violation(_) => "N0Violation",
            VariantMismatch(_) => "VariantMismatch",
            InvalidDegree(_) => "InvalidDegree",
            DichotomyUnavailable(_) => "DichotomyUnavailable",
            DegreesBounded(_) => "DegreesBounded",
            UnsupportedD(_) => "UnsupportedD",
            UnsupportedSpectrum(_) => "UnsupportedSpectrum",
            Undecided(_) => "Undecided",
            BudgetExceeded(_) => "BudgetExceeded",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
