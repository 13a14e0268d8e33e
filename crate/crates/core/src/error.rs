use thiserror::Error;

use crate::spacetime::EventId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("event {id} is not part of the model ({len} events)")]
    InvalidEvent { id: EventId, len: usize },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("weights must sum to 1, got {0}")]
    NotNormalized(String),

    #[error("event {0} appears more than once")]
    DuplicateEvent(EventId),

    #[error("marginal mismatch at event {atom}: left has {left}, right has {right}")]
    MarginalMismatch {
        atom: EventId,
        left: String,
        right: String,
    },

    #[error("{what} has {size} events, above the brute-force bound of {bound}")]
    Capacity {
        what: &'static str,
        size: usize,
        bound: usize,
    },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed document: {0}")]
    Document(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
