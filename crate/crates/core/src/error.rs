use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("invalid field parameter d = {0}: must be squarefree, nonzero and != 1")]
    InvalidField(i64),
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("{0} is not prime")]
    InvalidPrime(u64),
    #[error("zero element has no valuation")]
    ZeroElement,
    #[error("{d} has no square root in Z_{p}")]
    NotSplit { d: i64, p: u64 },
    #[error("requested precision {requested} exceeds cap {cap}")]
    PrecisionCapExceeded { requested: u32, cap: u32 },
    #[error("element is not integral at the place over {0}")]
    NotIntegral(u64),
    #[error("no term with valuation >= {0} found within the term limit")]
    NoConvergenceEvidence(u32),
    #[error("alpha values must be pairwise distinct")]
    RepeatedAlpha,
    #[error("alpha values must be nonzero")]
    ZeroAlpha,
    #[error("cutoff {cutoff} too small, need at least {needed}")]
    CutoffTooSmall { cutoff: usize, needed: usize },
    #[error("degenerate linear polynomial P: {0}")]
    DegenerateP(String),
    #[error("all lambda coefficients are zero")]
    AllLambdaZero,
    #[error("valuation set descriptor not supported here")]
    UnsupportedDescriptor,
    #[error("log H = {log_h} is below s*e^s = {min}")]
    HeightTooSmall { log_h: f64, min: f64 },
    #[error("ell exceeds 2^53; N(l) can no longer be resolved in double precision")]
    ScaleTooLarge,
    #[error("argument out of domain: {0}")]
    DomainError(String),
    #[error("invalid modulus or class count: {0}")]
    InvalidModulus(String),
    #[error("characteristic polynomial has a repeated root")]
    RepeatedRoots,
    #[error("characteristic roots are not algebraic integers")]
    NonIntegralRoots,
    #[error("recurrence order {0} unsupported (max 2)")]
    OrderUnsupported(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
