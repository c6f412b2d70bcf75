use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Dynkin type: {0}")]
    InvalidDynkin(String),
    #[error("invalid parabolic subset: {0}")]
    InvalidParabolic(String),
    #[error("unsupported group form: {0}")]
    UnsupportedForm(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("index {index} out of range 1..={rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("invalid J-invariant: {0}")]
    InvalidJInvariant(String),
    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("search budget of {0} steps exceeded")]
    SearchBudgetExceeded(u64),
    #[error("polynomial {dividend} is not divisible by {divisor}")]
    NotDivisible { dividend: String, divisor: String },
    #[error("quotient {0} has a negative coefficient")]
    NegativeCoefficient(String),
    #[error("non-integral rank: {0}")]
    NonIntegralRank(String),
    #[error("no summand polynomial supplied for prime {0}")]
    MissingPrime(u64),
    #[error("no m-positive divisor of {0} exists")]
    NoDivisor(String),
    #[error("group is not generically split by the given variety")]
    NotGenericallySplit,
    #[error("matrix is not idempotent modulo {0}")]
    NotAlmostIdempotent(u64),
    #[error("not an orthogonal family summing to the identity: {0}")]
    NotAFamily(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("determinant is {det} modulo {modulus}, expected 1")]
    DeterminantNotOne { det: u64, modulus: u64 },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("parse error: {0}")]
    Parse(String),
}
