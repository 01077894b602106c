use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid problem: {0}")]
    Validation(String),

    #[error("LP relaxation is infeasible")]
    Infeasible,

    #[error("LP relaxation is unbounded")]
    Unbounded,

    #[error("simplex failed to converge after {iterations} iterations")]
    NumericalFailure { iterations: usize },

    #[error("no feasible rounded solution")]
    NoFeasibleRounded,

    #[error("insufficient initial solutions: need at least 2, have {0}")]
    InsufficientSolutions(usize),

    #[error("initiating and guiding solutions are identical")]
    IdenticalPair,

    #[error("empty nondominated neighbor set")]
    EmptyCandidates,

    #[error("instance too large to enumerate: {0}")]
    EnumerationLimit(String),

    #[error("degenerate reference front: objective {0} has max = min")]
    DegenerateReference(usize),

    #[error("reference front has zero hypervolume")]
    ZeroReferenceVolume,

    #[error("point {index} has coordinate {value} above the reference point")]
    OutsideReference { index: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
