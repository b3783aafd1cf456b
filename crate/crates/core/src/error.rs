use thiserror::Error;

/// Errors raised while building or manipulating designs.
///
/// Verification failures are *not* errors: they are reported through
/// [`crate::verify::VerifyReport`] verdicts.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed block {0:?}: duplicate point {1}")]
    DuplicatePoint(Vec<u32>, u32),
    #[error("point {0} out of range for v = {1}")]
    PointOutOfRange(u32, u32),
    #[error("relabel map is not a bijection on 0..{0}")]
    NotABijection(u32),
    #[error("block has {got} points, expected k = {expected}")]
    WrongBlockSize { expected: usize, got: usize },
    #[error("groups do not partition the point set: {0}")]
    BadGroups(String),
    #[error("orbit length {0} exceeds the full period {1}")]
    OrbitTooLong(usize, usize),
    #[error("coordinate action applied to plain integer points")]
    CoordinateActionMismatch,
    #[error("inconsistent partial design: ordered pair ({0},{1}) covered more than lambda times")]
    OverCoveredPair(u32, u32),
    #[error("blocks {0:?} are not a subset of the design")]
    NotASubset(Vec<usize>),
    #[error("no ingredient for block size {0}")]
    MissingIngredient(usize),
    #[error("no fill design for group size {0}")]
    MissingFill(usize),
    #[error("ingredient {name} failed verification: {reason}")]
    BadIngredient { name: String, reason: String },
    #[error("{0}")]
    Recipe(String),
    #[error("v = 7 is the exception value: every super-simple 2-(7,4,1)DD has f = 2/7")]
    ExceptionValue,
    #[error("missing ingredient file: {0}")]
    MissingFile(String),
    #[error("group type {0} is inadmissible: {1}")]
    Inadmissible(String, String),
    #[error("{0} is not prime (general MOLS constructions are unsupported)")]
    NotPrime(u32),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown catalog id {0:?}")]
    UnknownCatalogId(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
