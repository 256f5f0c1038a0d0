use num_bigint::BigInt;
use thiserror::Error;

/// Errors raised by the counting library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: BigInt },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(String),

    #[error("moduli {first} and {second} (rows {} and {}) are not coprime", .row_a + 1, .row_b + 1)]
    NotCoprime {
        row_a: usize,
        row_b: usize,
        first: String,
        second: String,
    },

    #[error("{what}: {divisor} does not divide {value}")]
    NotDivisor {
        what: &'static str,
        divisor: String,
        value: String,
    },

    #[error("restriction table is missing the entry for row {row}, variable {var}")]
    IncompleteRestrictions { row: usize, var: usize },

    #[error("internal exactness check failed: {0}")]
    Inexact(String),

    #[error("search space {space} exceeds cap {cap}")]
    CapExceeded { space: String, cap: u64 },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("zero polynomial is not allowed here: {0}")]
    ZeroPolynomial(&'static str),

    #[error("modulus must be non-constant: {0}")]
    ConstantModulus(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("polynomials over different fields (GF({0}) vs GF({1}))")]
    FieldMismatch(u64, u64),

    #[error("character exponent classes are not equidistributed: {0}")]
    Equidistribution(String),

    #[error("cannot parse polynomial at offset {offset}: {message}")]
    PolyParse { offset: usize, message: String },
}

impl Error {
    /// True for errors that signal a violated theorem hypothesis or an
    /// unsupported input shape rather than a malformed argument.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::NotCoprime { .. }
                | Error::UnsupportedShape(_)
                | Error::CapExceeded { .. }
                | Error::IncompleteRestrictions { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
