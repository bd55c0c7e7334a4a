use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator and experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An input parameter or configuration value is out of range.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// A simulation invariant was violated. This indicates a bug, not bad input.
    #[error("simulation invariant violated: {0}")]
    Invariant(String),

    /// The LT decoder found symbols that contradict each other.
    #[error("inconsistent encoded symbols: {0}")]
    DataCorruption(String),

    /// The generator could not produce a connected topology within the retry budget.
    #[error("no connected topology for n={n}, radius={radius} after {attempts} attempts")]
    Disconnected { n: usize, radius: f64, attempts: u32 },

    /// Fewer alive nodes than the query needs.
    #[error("need {needed} alive nodes to query, only {alive} available")]
    InsufficientAlive { needed: usize, alive: usize },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by the filesystem rather than by configuration.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Csv { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
