use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("extension degree {h} out of range [1, {max}]")]
    DegreeOutOfRange { h: usize, max: usize },
    #[error("field size {p}^{h} exceeds the cap of {cap} elements")]
    FieldTooLarge { p: u64, h: usize, cap: u64 },
    #[error("precision m = {m} out of range (need 1 <= m <= {max} and p^m < 2^62)")]
    PrecisionOutOfRange { m: u32, max: u32 },
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("coefficient {coeff} is not divisible by {divisor}")]
    NotDivisible { coeff: String, divisor: String },
    #[error("Teichmuller iteration did not reach a fixed point within {0} steps")]
    NoFixedPoint(u32),
    #[error("value table has {found} entries, expected {expected}")]
    IncompleteTable { expected: usize, found: usize },
    #[error("{what} exceeds budget: {size} > {limit}")]
    BudgetExceeded {
        what: &'static str,
        size: u64,
        limit: u64,
    },
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("counting oracles disagree: brute force {brute}, reduced system {reduced}")]
    OracleMismatch { brute: u64, reduced: u64 },
    #[error("divisibility bound refuted: {0}")]
    Refutation(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Coarse outcome classes, used for exit codes and suite reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorClass {
    /// Malformed or out-of-range input.
    Input,
    /// An internal consistency check failed.
    Invariant,
    /// The two counters disagree, or a proven bound failed.
    Refutation,
    Budget,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::NotPrime(_)
            | Error::DegreeOutOfRange { .. }
            | Error::FieldTooLarge { .. }
            | Error::PrecisionOutOfRange { .. }
            | Error::ArityMismatch { .. }
            | Error::LengthMismatch { .. }
            | Error::InvalidBox(_)
            | Error::InvalidInstance(_)
            | Error::Parse(_) => ErrorClass::Input,
            Error::DivisionByZero
            | Error::NotDivisible { .. }
            | Error::NoFixedPoint(_)
            | Error::IncompleteTable { .. }
            | Error::Internal(_) => ErrorClass::Invariant,
            Error::OracleMismatch { .. } | Error::Refutation(_) => ErrorClass::Refutation,
            Error::BudgetExceeded { .. } => ErrorClass::Budget,
        }
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
