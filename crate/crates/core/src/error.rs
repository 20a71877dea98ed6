use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("morphology must have exactly 6 entries, got {0}")]
    MorphologyLength(usize),
    #[error("morphology entries must be 0 or 1, got {0:?}")]
    MorphologyValue(String),
    #[error("leg index {0} out of range 1..=6")]
    LegIndex(usize),
    #[error("insufficient functional legs for static stability: {0}")]
    Unrecoverable(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid gait schedule: {0}")]
    Schedule(String),
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("sample index {k} outside 1..={n}")]
    SampleIndex { k: usize, n: usize },
    #[error("leg {0} is not functional")]
    LostLeg(usize),
    #[error("tip unreachable for leg {leg}: {reason}")]
    Unreachable { leg: usize, reason: String },
    #[error("need at least {need} point pairs, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("only {anchored} legs anchored at t = {time:.4} s")]
    InsufficientSupport { anchored: usize, time: f64 },
    #[error("invalid optimizer config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, msg: impl ToString) -> Self {
        Error::Parse { path: path.into(), msg: msg.to_string() }
    }
}
