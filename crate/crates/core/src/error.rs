use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polygon has zero area")]
    DegeneratePolygon,
    #[error("polygon is not convex")]
    NotConvex,
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("half-plane normal must be nonzero and finite")]
    InvalidHalfPlane,
    #[error("moments taken about different reference points")]
    MismatchedReference,
    #[error("polygon order must be at least 3, got {0}")]
    InvalidOrder(usize),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("empty input")]
    EmptyInput,
    #[error("sites {0} and {1} coincide")]
    DuplicateSite(usize, usize),
    #[error("cells do not partition the domain: area sum {cells} vs domain {domain}")]
    PartitionGap { cells: f64, domain: f64 },
    #[error("verification failed: {0}")]
    VerificationFailure(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
