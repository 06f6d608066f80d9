use thiserror::Error;

use crate::metric::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },

    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        got: usize,
        expected: usize,
    },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("index {index} out of range for a space of {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("region belongs to a space of {region} points, not {space}")]
    AmbientMismatch { region: usize, space: usize },

    #[error("center outside region")]
    CenterOutsideRegion,

    #[error("empty region")]
    EmptyRegion,

    #[error("invalid metric: {0}")]
    InvalidMetric(Violation),

    #[error(
        "samples are not ({l}, {c})-quasi-geodesic: parameters ({a}, {b}) need C = {needed}"
    )]
    NotQuasiGeodesic {
        l: f64,
        c: f64,
        a: f64,
        b: f64,
        needed: f64,
    },

    #[error("missing sample at parameter {0}")]
    MissingSample(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{points} points exceeds the full 4-point scan cap of {cap}; use the fixed-base variant or force the scan")]
    GuardExceeded { points: usize, cap: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
