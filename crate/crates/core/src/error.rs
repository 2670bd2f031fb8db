use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
///
/// Indices carried in messages are 1-based.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index error: {0}")]
    Index(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{}: no data lines", .0.display())]
    EmptyDataset(PathBuf),

    #[error("table cache needs {required} bytes but the budget is {budget} bytes")]
    MemoryBudgetExceeded { required: usize, budget: usize },

    #[error("query is classified as {label:?}; the target segment is likely absent")]
    WrongClass { label: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
