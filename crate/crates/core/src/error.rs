use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed map file. `line` is 1-based for text grids; for PGM files it
    /// holds the byte offset where parsing stopped.
    #[error("map parse error at {location}: {message}")]
    MapParse { location: Location, message: String },

    #[error("unknown builtin map `{0}` (expected one of: room, clutter, maze)")]
    UnknownMap(String),

    #[error("unknown planner `{0}` (expected one of: rrt, b2u, mtrrt)")]
    UnknownPlanner(String),

    #[error("grid has no free cell to sample from")]
    NoFreeCell,

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("node index {index} out of range for tree of {len} nodes")]
    InvalidNode { index: usize, len: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trace error at line {line}: {message}")]
    Trace { line: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Position of a parse failure inside a map file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Line(usize),
    Byte(usize),
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Location::Line(l) => write!(f, "line {l}"),
            Location::Byte(b) => write!(f, "byte {b}"),
        }
    }
}
