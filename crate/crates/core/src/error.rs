//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A CSV row (or the header) could not be parsed. Lines are 1-based.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Timestamps are not strictly increasing, or spacing disagrees with the rate.
    #[error("ordering error at line {line}: {message}")]
    Ordering { line: usize, message: String },

    /// Mutually inconsistent configuration (e.g. series rate vs window rate).
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument violates an operation's preconditions.
    #[error("argument error: {0}")]
    Argument(String),

    /// Class balancing is impossible on this input.
    #[error("balance error: {0}")]
    Balance(String),

    /// Training preconditions violated (e.g. single-class data).
    #[error("training error: {0}")]
    Training(String),

    /// An iterative solver hit its pass limit before satisfying its tolerance.
    #[error("convergence error: no convergence after {passes} passes")]
    Convergence { passes: usize },

    /// A linear-algebra step failed (singular system, non-finite values).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Operation called on a model in the wrong state (e.g. untrained readout).
    #[error("state error: {0}")]
    State(String),

    /// Model artifact (de)serialization failed.
    #[error("artifact error: {0}")]
    Artifact(String),
}
