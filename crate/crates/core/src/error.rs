use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("expected a positive integer, got {0}")]
    NonPositive(i64),
    #[error("{0} is not prime")]
    NotPrime(i64),
    #[error("{0} is not a negative discriminant (need D < 0 and D = 0, 1 mod 4)")]
    InvalidDiscriminant(i64),
    #[error("form [{a},{b},{c}] is not positive definite")]
    NotPositiveDefinite { a: i64, b: i64, c: i64 },
    #[error("form [{a},{b},{c}] is not primitive")]
    NotPrimitive { a: i64, b: i64, c: i64 },
    #[error("form [{a},{b},{c}] is not ambiguous")]
    NotAmbiguous { a: i64, b: i64, c: i64 },
    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),
    #[error("p divides discriminant ({p} | {d})")]
    PDividesDiscriminant { p: i64, d: i64 },
    #[error("inert prime: kronecker({d}, {p}) = -1")]
    InertPrime { p: i64, d: i64 },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("3 divides m = {0}")]
    MultipleOfThree(i64),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid two-square solution: {0}")]
    InvalidSolution(String),
    #[error("composition congruences have no solution for {0}")]
    CompositionFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
}
