use thiserror::Error;

/// Errors across the library. `Certificate` and `OracleDisagreement` mark
/// internal inconsistencies (a bug, never a bad input) and map to a distinct
/// exit code in the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("zero element")]
    ZeroElement,

    #[error("unbound name in word: {0}")]
    UnboundName(String),

    #[error("basis is rank-deficient")]
    RankDeficient,

    #[error("degenerate basis: residue classes of the generators collide")]
    DegenerateBasis,

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("certificate verification failed: {0}")]
    Certificate(String),

    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),
}

pub type Result<T> = std::result::Result<T, Error>;
