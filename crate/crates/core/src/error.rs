//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid token id {token} for vocabulary of size {vocab_size}")]
    InvalidToken { token: u32, vocab_size: u32 },

    #[error("invalid vocabulary size {0}: must be in 16..=256")]
    InvalidVocabSize(u32),

    #[error("invalid model shape: {0}")]
    InvalidShape(String),

    #[error("numeric failure in {context}: {detail}")]
    NumericFailure { context: String, detail: String },

    #[error("reserved marker token {token} inside a context payload")]
    MarkerInPayload { token: u32 },

    #[error("malformed serialized context: {0}")]
    MalformedContext(String),

    #[error("harness call budget of {budget} exhausted before halt")]
    BudgetExceeded { budget: usize },

    #[error("harness program error: {0}")]
    Program(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint format error: {0}")]
    CheckpointFormat(String),

    #[error("ragged sample counts: expected {expected} samples per question, got {got}")]
    RaggedSamples { expected: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
