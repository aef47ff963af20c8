use thiserror::Error;

/// Crate-wide error type. The CLI maps variants to exit codes:
/// configuration/usage problems exit 2, infeasible plans exit 3, and
/// numeric or domain failures exit 4.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a physical or mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// The configuration file or CLI invocation is invalid.
    #[error("configuration error: {0}")]
    Config(String),
    /// A numerical procedure failed to converge or lost validity.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// The requested plan cannot meet its constraints.
    #[error("infeasible plan: {0}")]
    Infeasible(String),
    /// The drive frequency does not hit any resonant channel.
    #[error("resonance mismatch: {0}")]
    Resonance(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
