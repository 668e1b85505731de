use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial division left a nonzero remainder")]
    NonDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("parts are not strictly decreasing")]
    NotStrict,
    #[error("parts are not weakly decreasing")]
    NotWeak,
    #[error("evaluation points repeat; the Vandermonde determinant vanishes")]
    RepeatedPoint,
    #[error("zero evaluation points require matching trailing zero parts")]
    ZeroLimitInvalid,
    #[error("zero argument where a nonzero value is required")]
    ZeroArgument,
    #[error("identity mismatch: {0}")]
    IdentityMismatch(String),
    #[error("deviation delta={delta} is neither 0 nor k={k}")]
    InvalidDeviation { delta: usize, k: usize },
    #[error("two walkers share a site")]
    Collision,
    #[error("states have different particle numbers")]
    SizeMismatch,
    #[error("{count} mode subsets exceed the budget of {budget}")]
    ModeEnumerationTooLarge { count: u128, budget: u128 },
    #[error("palette has too few colours for {0} paths")]
    PaletteExhausted(usize),
    #[error("inconsistent nest: {0}")]
    InconsistentNest(String),
    #[error("fit window collides with the recurrence time")]
    RegimeTooSmall,
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
