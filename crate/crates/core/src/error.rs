use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("missing assignment for variable {0}")]
    MissingAssignment(usize),

    #[error("interpolation table is not total: missing {0:?}")]
    IncompleteTable(Vec<u64>),

    #[error("zero polynomial has no well-defined root set")]
    ZeroPolynomial,

    #[error("coefficient too large for exhaustive root search")]
    CoefficientTooLarge,

    #[error("polynomial syntax error at column {column}: {message}")]
    PolySyntax { column: usize, message: String },

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("invalid finite group table: {0}")]
    InvalidGroupTable(String),

    #[error("singular lattice basis")]
    SingularBasis,

    #[error("no separating subgroup found up to index {0}")]
    SearchExhausted(usize),

    #[error("memory element {0} is not in the subgroup")]
    NotInSubgroup(String),

    #[error("enumeration cap exceeded: {needed} candidates, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("value is not a point of the alphabet: {0}")]
    NotAPoint(String),

    #[error("map output violates codomain equations at input {input}: output {output}")]
    CodomainViolation { input: String, output: String },

    #[error("operation requires a finite alphabet")]
    InfiniteAlphabet,

    #[error("alphabet has no points; refusing to pad the memory set")]
    EmptyAlphabet,

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
