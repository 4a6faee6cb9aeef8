use std::path::PathBuf;

/// Errors raised by the estimators, evaluators and the experiment harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent dimensions or an invalid experiment description.
    #[error("configuration error: {0}")]
    Config(String),

    /// A linear system or decomposition could not be solved reliably.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The spectral search found fewer strict local maxima than requested.
    #[error("insufficient peaks: found {found} strict local maxima, requested {requested}")]
    InsufficientPeaks { found: usize, requested: usize },

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
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::InsufficientPeaks { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
