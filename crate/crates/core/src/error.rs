use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {got} outside supported range 1..={max}")]
    QubitCount { got: usize, max: usize },

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("qubit index {0} listed more than once")]
    DuplicateQubit(usize),

    #[error("{kind} acts on {expected} qubit(s), got {got}")]
    Arity {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("no value supplied for parameter `{0}`")]
    MissingParameter(String),

    #[error("parameter `{name}` declared with conflicting values {first} and {second}")]
    ParameterConflict {
        name: String,
        first: f64,
        second: f64,
    },

    #[error("unknown gate occurrence {0}")]
    UnknownOccurrence(usize),

    #[error("gate occurrence {0} has a literal angle and cannot be shifted")]
    LiteralShift(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("{0}")]
    InvalidValue(String),

    #[error("undefined for a zero vector")]
    ZeroVector,

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("config: {0}")]
    Config(String),

    #[error("initialization did not converge: best cost {best:.3e} > {threshold:.1e}")]
    InitNotConverged { best: f64, threshold: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
