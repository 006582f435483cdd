use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("degenerate polytope: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{name} = {value} is outside the admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("point lies outside the host body")]
    OutsideBody,

    #[error("empty cap: the cut carries no mass")]
    EmptyCap,

    #[error("singular linear map (|det| = {0:e})")]
    SingularMap(f64),

    #[error("empty halfspace intersection: {0}")]
    EmptyIntersection(String),

    #[error("origin is not interior: {0}")]
    OriginNotInterior(String),

    #[error("invalid spec field `{field}`: {reason}")]
    Spec { field: String, reason: String },
}

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, range: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            value,
            range: range.into(),
        }
    }
}
