use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty surface `{0}`")]
    EmptySurface(String),
    #[error("degenerate triangle (area {area:e} m^2)")]
    DegenerateTriangle { area: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid kinematic chain: {0}")]
    InvalidChain(String),
    #[error("configuration has {got} coordinates, chain has {expected} joints")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown contact point {0}")]
    UnknownContact(usize),
    #[error("invalid constraint set: {0}")]
    InvalidConstraints(String),
    #[error("mode vectors differ in length ({0} vs {1})")]
    ModeLengthMismatch(usize, usize),
    #[error("illegal mode change {from:?} -> {to:?}")]
    IllegalModeEdge { from: Vec<u8>, to: Vec<u8> },
    #[error("invalid planning problem: {0}")]
    InvalidProblem(String),
    #[error("scenario error in `{field}`: {message}")]
    Scenario { field: String, message: String },
    #[error("unknown scenario `{name}` (valid: {valid})")]
    UnknownScenario { name: String, valid: String },
    #[error("unknown planner `{0}` (valid: rrt, prm)")]
    UnknownPlanner(String),
    #[error("invalid benchmark setup: {0}")]
    Bench(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn scenario(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
