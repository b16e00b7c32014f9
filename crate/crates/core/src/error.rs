//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported prime {0} (supported: 2, 3, 5)")]
    UnsupportedPrime(u32),

    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),

    #[error("precision {requested} is outside 1..={max} for p = {prime}")]
    PrecisionOutOfRange { prime: u32, requested: u32, max: u32 },

    /// A claimed exact division by `p^required` failed. Integrality claims
    /// are checked through this error, so it firing on valid input is a bug
    /// in the claim, not in the caller.
    #[error("not divisible: valuation {valuation} < {required}")]
    NotDivisible { valuation: u32, required: u32 },

    #[error("precision exhausted: {available} digits available, {required} needed")]
    PrecisionExhausted { available: u32, required: u32 },

    #[error("not a unit")]
    NotAUnit,

    #[error("outside domain: {0}")]
    OutsideDomain(String),

    #[error("generator registries differ")]
    RegistryMismatch,

    #[error("generator {0} has no assigned image and is not declared fixed")]
    UnassignedGenerator(String),

    #[error("unknown generator {0}")]
    UnknownGenerator(String),

    #[error("rewrite system does not terminate: {0}")]
    NonTerminating(String),

    #[error("theta level {level} exceeds level cap {cap}")]
    LevelCapExceeded { level: u32, cap: u32 },

    #[error("Mahler sample window incomplete: trailing differences do not vanish")]
    IncompleteSampleWindow,

    #[error("digit window too small: {0}")]
    WindowTooSmall(String),

    #[error("base series is not u*q + O(q^2) with u a unit")]
    BaseNotInvertible,

    #[error("coefficient {index} is not integral")]
    NotIntegral { index: usize },

    #[error("input was truncated by a degree cap; {0} needs exact polynomials")]
    TruncatedInput(&'static str),

    #[error("list too short: need {needed} entries, got {got}")]
    InsufficientLength { needed: usize, got: usize },

    #[error("matrix dimension mismatch")]
    DimensionMismatch,

    #[error("unsupported degree {0}")]
    UnsupportedDegree(i64),

    #[error("unknown check {0:?}")]
    UnknownCheck(String),

    #[error("golden file {0} is missing (pass --regenerate-golden to create it)")]
    MissingGolden(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
