use thiserror::Error;

/// Errors reported across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Input matrix is not symmetric within tolerance, or contains
    /// non-finite entries.
    #[error("matrix is not symmetric (or not finite): {0}")]
    NotSymmetric(String),

    /// A leading principal minor is not strictly positive; the matrix is
    /// degenerate or indefinite.
    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Fewer observations than the statistic requires.
    #[error("too few samples: need {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    /// Design matrix does not have full column rank.
    #[error("rank-deficient design matrix")]
    RankDeficient,

    /// Function evaluated outside its domain.
    #[error("domain error: {0}")]
    DomainError(String),

    /// Invalid configuration (empty grids, out-of-range levels, ...).
    #[error("invalid configuration: {0}")]
    ConfigError(String),

    /// Requested level is not tabulated in the envelope table.
    #[error("alpha={0} is not in the envelope table")]
    UnknownAlpha(f64),

    /// Index selectors out of bounds or overlapping.
    #[error("bad index selection: {0}")]
    BadIndices(String),

    /// More than 1% of simulation replicates had to be redrawn.
    #[error("degenerate scenario: {retries} retries over {reps} replicates")]
    DegenerateScenario { retries: usize, reps: usize },

    /// Malformed table file.
    #[error("parse error: {0}")]
    ParseError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
