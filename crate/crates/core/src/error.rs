//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A game configuration fails a required inequality; the message names it.
    #[error("configuration rejected: {0}")]
    Config(String),

    /// A strategy broke the claim protocol (claimed a non-free element,
    /// claimed the wrong number of elements, ...).
    #[error("protocol violation by {offender}: {detail}")]
    Protocol { offender: String, detail: String },

    /// An exact algorithm was asked to run above its size gate.
    #[error("exact mode is gated to n <= {gate}, got n = {n}")]
    ExactGate { gate: usize, n: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
