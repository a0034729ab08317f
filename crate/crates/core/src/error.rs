use thiserror::Error;

/// Errors shared across the crate. Structure-equation violations are *values*
/// (see [`crate::module::StructureReport`]), not errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed matching: {0}")]
    MalformedMatching(String),
    #[error("surgery on the matched circle yields a disconnected 1-manifold")]
    DisconnectedSurgery,
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("span closure violation: {0}")]
    ClosureViolation(String),
    #[error("chord out of range: [{0},{1}]")]
    ChordOutOfRange(usize, usize),
    #[error("idempotent set has the wrong size: got {got}, need {need}")]
    WrongSize { got: usize, need: usize },
    #[error("differential does not square to zero: {0}")]
    NotAComplex(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("slot mismatch: {0}")]
    SlotMismatch(String),
    #[error("box tensor sum may not converge: {0}")]
    ConvergenceRisk(String),
    #[error("objects live over different algebras: {0} vs {1}")]
    AlgebraMismatch(String, String),
    #[error("degree bound too small: {0}")]
    DegreeBoundTooSmall(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
