use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("unknown subdomain tag `{0}`")]
    UnknownTag(String),
    #[error("degenerate triangle {index} (signed area {area:e})")]
    DegenerateTriangle { index: usize, area: f64 },
    #[error("malformed mesh: {0}")]
    MeshFormat(String),
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),
    #[error("function evaluation returned a non-finite value at ({x}, {y})")]
    Evaluation { x: f64, y: f64 },
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("singular pivot block at row {row}")]
    SingularPivot { row: usize },
    #[error("iterative solver stalled after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("eigenvalue iteration failed: {0}")]
    Eigen(String),
    #[error("active-set iteration did not settle within {iterations} steps (residual {residual:e})")]
    ActiveSetCycle { iterations: usize, residual: f64 },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("energy bounds require an unconstrained problem")]
    ConstrainedProblem,
    #[error("reference errors unavailable: {0}")]
    MissingReference(String),
    #[error("no records to write")]
    EmptyRecords,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
