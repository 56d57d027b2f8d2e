use thiserror::Error;

/// Errors raised by the algebraic operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("level mismatch: {0}")]
    LevelMismatch(String),
    #[error("parameter mismatch between operands")]
    ParamsMismatch,
    #[error("index order violated: {0}")]
    IndexOrder(String),
    #[error("{0} is not congruent to 1 mod p")]
    NotInU1(String),
    #[error("evaluation map is not well defined: {0}")]
    IllDefined(String),
    #[error("bad vector: {0}")]
    BadVector(String),
    #[error("property P requires m >= 2")]
    MTooSmall,
    #[error("subgroup order violated: {0}")]
    SubgroupOrder(String),
    #[error("unknown generator: {0}")]
    UnknownGenerator(String),
    #[error("elements belong to different presentations")]
    PresentationMismatch,
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("not an interpolated vector: {0}")]
    NotInterpolated(String),
    #[error("p = 2 requires d = 1 mod 4, got {0}")]
    Hypothesis2Violated(String),
    #[error("impossible b pattern at index {0}")]
    ImpossibleBPattern(usize),
    #[error("excluded case p = 2, omega = 1 < nu")]
    ExcludedCase,
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} is not coprime to the conductor {1}")]
    NotCoprime(i64, u64),
    #[error("element is not fixed by the subgroup of level {0}")]
    NotInLevel(u32),
    #[error("twist {0} is not congruent to 1 mod p")]
    BadTwist(String),
    #[error("tower is not cyclotomic")]
    NotCyclotomic,
    #[error("witness does not represent the norm pair")]
    NotARepresentative,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
