use thiserror::Error;

use crate::delta::DeltaPoint;
use crate::ordinal::Ordinal;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ordinal literal {input:?}: {reason}")]
    ParseOrdinal { input: String, reason: String },

    #[error("invalid rational {0:?}")]
    ParseRational(String),

    #[error("point {point} lies outside [0,{endpoint}]")]
    OutsideCompact { point: Ordinal, endpoint: Ordinal },

    #[error("compact mismatch: [0,{left}] vs [0,{right}]")]
    CompactMismatch { left: Ordinal, right: Ordinal },

    #[error("cuts must be strictly increasing ({0} is not above its predecessor)")]
    UnsortedCuts(Ordinal),

    #[error("cut {cut} is not below the endpoint {endpoint}")]
    CutBeyondEndpoint { cut: Ordinal, endpoint: Ordinal },

    #[error("expected {expected} values for {cuts} cuts, got {got}")]
    LengthMismatch {
        cuts: usize,
        expected: usize,
        got: usize,
    },

    #[error("{0} must be positive")]
    NonPositive(&'static str),

    #[error("the derived set is empty")]
    EmptyDerivedSet,

    #[error("{0}")]
    InvalidArgument(String),

    #[error("distinct points {sigma} and {tau} have identical images (contraction is infinite)")]
    CoincidentImages { sigma: DeltaPoint, tau: DeltaPoint },

    #[error("need at least two distinct points, got {0}")]
    TooFewPoints(usize),

    #[error("vectors must have disjoint supports (shared index {0})")]
    OverlappingSupports(u64),

    #[error("no image recorded for {0}")]
    MissingImage(String),

    #[error("no limit point of B inside the window; enlarge the window")]
    InsufficientWindow,

    #[error("inequality chain violated: {0}")]
    ChainViolated(String),

    #[error("set has more than {0} points")]
    TooManyPoints(usize),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
