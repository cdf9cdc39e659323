use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid directional distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid lifetime rule: {0}")]
    InvalidRule(String),

    /// The geometry, distribution and rule do not belong together (e.g. a
    /// Mondrian distribution applied to a polygon).
    #[error("incompatible inputs: {0}")]
    Mismatch(String),

    #[error("cell is degenerate: {0}")]
    DegenerateCell(String),

    /// The hyperplane does not cut the interior of the cell. Callers that
    /// sampled the plane should draw again.
    #[error("hyperplane misses the interior of the cell")]
    SplitMissesInterior,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("iteration limit reached: {0}")]
    LimitReached(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
