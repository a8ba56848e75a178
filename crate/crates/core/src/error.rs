use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {index} out of range for n = {n} (must be < {limit})")]
    IndexOutOfRange { index: usize, n: u32, limit: usize },

    #[error("n = {n} exceeds the dimension cap {cap}")]
    DimensionCap { n: u32, cap: u32 },

    #[error("n must be at least {min}, got {n}")]
    DimensionTooSmall { n: u32, min: u32 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("{0} is not squarefree")]
    NotSquarefree(u64),

    #[error("{value} has a prime factor above the trial-division bound {bound}")]
    FactorizationBound { value: u64, bound: u64 },

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error("elements live over different radicand vectors")]
    MismatchedRadicands,

    #[error("radicand vector is inconsistent: {0}")]
    InconsistentRadicands(String),

    #[error("case {requested} does not match the radicands (classified as case {actual})")]
    CaseMismatch { requested: u8, actual: u8 },

    #[error("generators are not in normalized order for case {0}")]
    NotNormalized(u8),

    #[error("tuple is not strongly carefree")]
    NotCarefree,

    #[error("tuple is degenerate (some coordinate equals 1)")]
    DegenerateTuple,

    #[error("radicands tie ({0}); a valid field never has equal radicands")]
    TiedRadicands(u64),

    #[error("invalid shape window: {0}")]
    InvalidWindow(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("estimated cost {estimate} exceeds the budget {budget}")]
    BudgetExceeded { estimate: u128, budget: u128 },

    #[error("prime {0} is not supported here")]
    UnsupportedPrime(u64),

    #[error("predicted count is zero at checkpoint {0}")]
    ZeroPrediction(String),

    #[error("quadrature did not converge within {0} evaluations")]
    Nonconvergence(u64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
