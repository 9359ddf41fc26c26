use std::path::PathBuf;

use thiserror::Error;

use crate::field_calculus::Kind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("kind {found:?} not accepted by {op} (expected {expected})")]
    KindMismatch {
        op: &'static str,
        found: Kind,
        expected: &'static str,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("slot index out of range: {0}")]
    SlotOutOfRange(String),

    #[error("variance mismatch: {0}")]
    VarianceMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("singular jacobian at node {node} (det = {det:e})")]
    SingularJacobian { node: usize, det: f64 },

    #[error("flow map lost orientation at node {node}, pseudo-time {s:e} (det = {det:e}); reduce |s|")]
    FlowDegenerate { node: usize, s: f64, det: f64 },

    #[error("invalid state: {what} at node {node} (value {value:e})")]
    InvalidState {
        what: &'static str,
        node: usize,
        value: f64,
    },

    #[error("constitutive failure: {what} at node {node} (value {value:e})")]
    Constitutive {
        what: &'static str,
        node: usize,
        value: f64,
    },

    #[error("thermal floor violated at node {node}: e - W - H = {margin:e} below {floor:e}")]
    ThermalFloor { node: usize, margin: f64, floor: f64 },

    #[error("step failed at t = {t:e} with dt = {dt:e}: {source}; last good state kept, try a smaller dt")]
    StepFailed {
        t: f64,
        dt: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed snapshot {path}: {reason}")]
    Snapshot { path: PathBuf, reason: String },

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

    /// True for failures caused by user input (bad config, bad preset payload).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Json(_) | Error::InvalidGrid(_) | Error::ShapeMismatch(_)
        )
    }
}
