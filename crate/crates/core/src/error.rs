use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the exploration stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("map parse error at line {line}: {message}")]
    MapParse { line: usize, message: String },

    #[error("open world: border cell ({col}, {row}) is not occupied")]
    OpenWorld { col: usize, row: usize },

    #[error("map has no known cells")]
    EmptyMap,

    #[error("sequence must be non-empty")]
    EmptySequence,

    #[error("exact ordering supports at most {max} regions, got {got}")]
    TooManyRegions { got: usize, max: usize },

    #[error("angle {0} outside [0, pi]")]
    Domain(f64),

    #[error("no path from ({from_x:.2}, {from_y:.2}) to ({to_x:.2}, {to_y:.2}) in known space")]
    Unreachable {
        from_x: f64,
        from_y: f64,
        to_x: f64,
        to_y: f64,
    },

    #[error("every frontier point is unreachable")]
    AllUnreachable,

    #[error("start position ({0:.2}, {1:.2}) is not in free space")]
    BadStart(f64, f64),

    #[error("tick budget of {budget} exhausted")]
    TickBudget { budget: u64 },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("run with seed {seed} failed: {source}")]
    Run {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(key: &str, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
