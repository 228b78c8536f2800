use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} is not a finite binary64 value")]
    NonFinite(f64),

    #[error("rational {0} is out of binary64 range")]
    FloatOverflow(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("basis matrix is singular")]
    SingularBasis,

    #[error("polyhedron is empty")]
    EmptyPolyhedron,

    #[error("polyhedron has an empty interior")]
    NoInterior,

    #[error("simplex iteration limit reached")]
    IterationLimit,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
