use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {got} exceeds the limit {limit}")]
    GuardExceeded {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("invalid forest: {0}")]
    InvalidForest(String),

    #[error("level {0} is empty")]
    EmptyLevel(usize),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("vertex {0} lies on the boundary")]
    BoundaryVertex(usize),

    #[error("spin state does not match the model: {0}")]
    SpinMismatch(String),

    #[error("contour does not separate the root from the boundary")]
    NotSeparating,

    #[error("invalid insertion site: {0}")]
    InvalidSite(String),

    #[error("collapse would not leave a Lorentzian triangulation: {0}")]
    InvalidCollapse(String),

    #[error("path is not usable: {0}")]
    InvalidPath(String),

    #[error("path neighbourhood does not embed into the triangulation")]
    NotEmbedded,

    #[error("modification plan is inconsistent: {0}")]
    InvalidPlan(String),
}

pub type Result<T> = std::result::Result<T, Error>;
