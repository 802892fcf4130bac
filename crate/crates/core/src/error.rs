use thiserror::Error;

use crate::ring::RingId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported ring: d = {0} (expected one of 1, 2, 3, 7, 11)")]
    UnsupportedRing(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("gcd(0, 0) is undefined")]
    GcdOfZeros,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid level: {0}")]
    InvalidLevel(String),
    #[error("corrupt group data: {0}")]
    CorruptData(String),
    #[error("no cell complex shipped for {group} over d = {ring}; supply one with a data file in the cell-complex JSON schema")]
    MissingCellData { group: String, ring: RingId },
    #[error("linear algebra contract violated: {0}")]
    Contract(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("sweep for d = {d} below {x} is missing {} levels (first norms: {:?})", missing.len(), &missing[..missing.len().min(8)])]
    IncompleteSweep { d: u32, x: u64, missing: Vec<u64> },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
