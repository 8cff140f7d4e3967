use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Malformed complex, chain or field layout.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("unknown cube `{0}`")]
    UnknownCube(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("degree underflow: operation needs degree >= {min}, got {found}")]
    DegreeUnderflow { min: usize, found: usize },

    #[error("degree overflow: degree {found} exceeds maximum {max}")]
    DegreeOverflow { max: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("map undefined at node {node:?}: {reason}")]
    UndefinedNode { node: Vec<f64>, reason: String },

    #[error("point {point:?} lies inside exclusion zone `{zone}`")]
    Excluded { point: Vec<f64>, zone: String },

    #[error("advection failed: node {node} at t = {time}: {reason}")]
    Advection {
        node: usize,
        time: f64,
        reason: String,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("field `{field}` (line {line}): {message}")]
    Field {
        field: String,
        line: usize,
        message: String,
    },

    #[error("declared property `{property}` failed verification: {detail}")]
    Declaration { property: String, detail: String },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("loop is not closed: endpoint gap {gap:e}")]
    NonClosedLoop { gap: f64 },

    #[error("degenerate vortex tube: {0}")]
    DegenerateTube(String),

    #[error("empty sample grid")]
    EmptyGrid,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
