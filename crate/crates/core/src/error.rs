use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("radicand must be at least 2, got {0}")]
    InvalidRadicand(u64),
    #[error("{0} reduces to a perfect cube; Q(cbrt({0})) is not a cubic field")]
    NotACubicField(u64),
    #[error("{norm} is not a principal factor norm for d = {d}")]
    NotAPrincipalFactorNorm { d: u64, norm: u64 },
    #[error("congruence invariants are undefined: 3 divides d1*d3*d4*d5 or d1*d2*d4*d6")]
    ThreeDividesInvariant,
    #[error("field elements belong to different fields (d = {0} and d = {1})")]
    MixedParents(u64, u64),
    #[error("lattice enumeration exceeded its budget ({0})")]
    EnumerationOverflow(String),
    #[error("brute force search exceeded its budget ({0})")]
    BudgetExceeded(String),
    #[error("cube test undecided within {bits} bits of precision")]
    Undecided { bits: u64 },
    #[error("criterion hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("field Q(cbrt({0})) is not of principal factorization type beta")]
    NotTypeBeta(u64),
    #[error("{0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
