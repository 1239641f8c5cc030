use crate::rootsys::WeylWord;

/// Errors raised by every fallible operation in the crate.
#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown Cartan type `{0}` (expected A1..A6 or D4)")]
    UnknownType(String),
    #[error("invalid Cartan matrix: {0}")]
    InvalidCartan(String),
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("{0} is not a reduced word")]
    NotReduced(WeylWord),
    #[error("{word} has length {len}, expected a reduced word of the longest element (length {expected})")]
    NotLongest { word: WeylWord, len: usize, expected: usize },
    #[error("words {0} and {1} represent different Weyl group elements")]
    DifferentElements(WeylWord, WeylWord),
    #[error("reduced-word enumeration exceeded the cap of {0} words")]
    WordCap(usize),
    #[error("Weyl group exceeds the cap of {0} elements")]
    WeylCap(usize),
    #[error("weight of height {height} exceeds the enumeration cap {cap}")]
    HeightCap { height: i64, cap: i64 },
    #[error("weight {0} is not in the positive root cone")]
    NotPositive(String),
    #[error("expected {expected} coordinates, got {got}")]
    Length { expected: usize, got: usize },
    #[error("weights differ: {0} vs {1}")]
    WeightMismatch(String, String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("{what} lives in type {expected}, not {got}")]
    WrongType { what: String, expected: String, got: String },
    #[error("orientation is invalid: {0}")]
    BadOrientation(String),
    #[error("word {0} is not adapted to the orientation")]
    NotAdapted(WeylWord),
    #[error("cache i/o: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
