use std::path::PathBuf;

use crate::plan::SpaceFunction;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid design program: {0}")]
    Program(String),

    #[error("infeasible design program: {0}")]
    Infeasible(String),

    #[error("generation failed: found {found} of {target} requested designs after {generations} generations")]
    GenerationExhausted {
        found: usize,
        target: usize,
        generations: usize,
    },

    #[error("weather file line {line}: {message}")]
    Epw { line: usize, message: String },

    #[error("invalid construction: {0}")]
    Construction(String),

    #[error("plan rejected by validation: {0}")]
    InvalidPlan(String),

    #[error("no schedule for space {space} ({function:?})")]
    MissingSchedule {
        space: String,
        function: SpaceFunction,
    },

    #[error("series mismatch: {0}")]
    SeriesMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
