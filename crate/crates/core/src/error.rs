use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1} bits")]
    DimensionMismatch(usize, usize),
    #[error("adversary has a fixed point at index {0}")]
    FixedPointAdversary(u64),
    #[error("enumeration budget exceeded: need {needed}, cap {cap}")]
    EnumerationBudgetExceeded { needed: u128, cap: u128 },
    #[error("no prime in the open interval ({lo}, {hi})")]
    NoPrimeInRange { lo: u64, hi: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("source value 0 is outside the multiplicative group")]
    ZeroSource,
    #[error("subset of output bits must be non-empty")]
    EmptySubset,
    #[error("coordinate {0} is not valid for this joint distribution")]
    InvalidCoordinate(usize),
    #[error("requested {m} output bits, at most {max} available")]
    OutputTooWide { m: usize, max: usize },
    #[error("{c} rows do not evenly divide {n} bits")]
    IndivisibleBlocks { n: usize, c: usize },
    #[error("seed width mismatch: extractor wants {expected} bits, got {got}")]
    SeedWidthMismatch { expected: usize, got: usize },
    #[error("{what}: expected {expected} bits, got {got}")]
    WidthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("coefficient t1 must be non-zero")]
    ZeroCoefficient,
    #[error("randomness stream exhausted: needed {needed} more bits")]
    InsufficientRandomness { needed: usize },
    #[error("factoring 2^{ell} - 1 exceeded the step cap")]
    FactoringInfeasible { ell: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

pub type Result<T> = std::result::Result<T, Error>;
