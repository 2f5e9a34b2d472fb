use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("Q-value divergence: |Q| = {value:.3} exceeds watchdog bound {bound:.3}")]
    Divergence { value: f64, bound: f64 },

    #[error("impossible observation: channel {channel} observed {} has zero prior probability", if *.observation { "good" } else { "bad" })]
    ImpossibleObservation { channel: usize, observation: bool },

    #[error("trace exhausted after {0} slots")]
    EndOfTrace(usize),

    #[error("trace parse error at line {line}: {msg}")]
    TraceParse { line: usize, msg: String },

    #[error("replay buffer holds {have} records, minibatch needs {need}")]
    NotReady { have: usize, need: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::TraceParse { .. } => 2,
            Error::Numeric(_) | Error::Divergence { .. } => 3,
            Error::Capacity(_) => 4,
            _ => 1,
        }
    }
}
