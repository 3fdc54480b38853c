use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector cannot be normalized to a state")]
    ZeroVector,

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(usize),

    #[error("capacity exceeded for {what}: requested {requested}, cap {cap}")]
    Capacity {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension {0} is odd: no two sign vectors are orthogonal")]
    OddDimension(usize),

    #[error("states {first} and {second} are the same ray (equal up to global phase)")]
    DuplicateStates { first: usize, second: usize },

    #[error("orthonormal completion failed for edge ({0}, {1})")]
    DegenerateCompletion(usize, usize),

    #[error("state does not appear in any basis of the model")]
    NotInBasis,

    #[error("index {index} out of range ({len} available) for {what}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("subset is not measure-one for the reference preparation (mass {mass})")]
    NotMeasureOne { mass: f64 },

    #[error("state has no exact rational representation; exact mode unavailable")]
    InexactState,

    #[error("linear program is infeasible (Born constraints cannot be met over the given bases)")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn capacity(what: &'static str, requested: u128, cap: u128) -> Self {
        Error::Capacity {
            what,
            requested,
            cap,
        }
    }
}
