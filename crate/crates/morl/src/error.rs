//! Shared error type for the toolkit.

use thiserror::Error;

/// Errors surfaced by library operations.
///
/// `Config` covers anything detectable before execution starts (bad weights,
/// malformed layouts, inconsistent experiment settings); the remaining
/// variants are violations raised while running.
#[derive(Debug, Error)]
pub enum MorlError {
    /// Two vectors that must share a dimension do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// A caller broke an operation's precondition at runtime.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A statistic was requested on a history shorter than it needs.
    #[error("insufficient samples: need at least {need}, have {have}")]
    InsufficientSamples { need: usize, have: usize },

    /// Steppingstone retrieval on an empty policy store.
    #[error("no steppingstone policy is stored")]
    NoSteppingstone,

    /// Coverage-set lookup on an empty set.
    #[error("coverage set is empty")]
    EmptyCoverageSet,

    /// A coverage-set training budget ran out before the edge policies existed.
    #[error("partial coverage set: {0}")]
    PartialCoverageSet(String),

    /// A statistical test has no defined value for the given samples.
    #[error("undefined statistical test: {0}")]
    DegenerateTest(String),

    /// Invalid configuration (weights, layouts, experiment settings).
    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl MorlError {
    /// True for errors a user can fix by editing inputs rather than rerunning.
    pub fn is_config(&self) -> bool {
        matches!(self, MorlError::Config(_) | MorlError::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, MorlError>;
