use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error("field of order {p}^{m} exceeds the supported size 2^32")]
    FieldTooLarge { p: u64, m: u32 },
    #[error("element encoding {enc} is out of range for a field of order {q}")]
    ElementOutOfRange { enc: u64, q: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("operation requires a field of odd characteristic")]
    RequiresOddField,
    #[error("operation requires a field of characteristic 2")]
    RequiresEvenField,
    #[error("parameters outside the formula's domain: {0}")]
    OutOfDomain(String),
    #[error("budget exceeded for {what}: needs {needed}, budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("repeated interpolation node {0}")]
    RepeatedNode(u32),
    #[error("polynomial degree {found} is not allowed here (expected {expected})")]
    WrongDegree { expected: String, found: String },
    #[error("the zero polynomial has no leading coefficient")]
    ZeroPolynomial,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
