use thiserror::Error;

/// Errors produced by the simulation, solver and predictor routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph family {family} requires n >= {min}, got {n}")]
    GraphTooSmall { family: &'static str, min: usize, n: usize },

    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),

    #[error("start set must be nonempty")]
    EmptyStart,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph has {n} vertices, above the exact-solver cap of {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("blue set must be a nonempty proper subset of the vertices")]
    DegenerateBlueSet,

    #[error("first set is not a subset of the second")]
    NotSubset,

    #[error("malformed edge list at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("missing trajectory data: {0}")]
    MissingTrajectory(&'static str),

    #[error("degenerate regressor: all x values equal")]
    DegenerateRegressor,

    #[error("need at least {need} rows, got {got}")]
    TooFewRows { need: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
