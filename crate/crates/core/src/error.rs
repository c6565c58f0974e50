use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("segment endpoints coincide")]
    DegenerateSegment,
    #[error("constraint offset must be nonnegative, got {0}")]
    NegativeOffset(f64),
    #[error("constraints are identical; equal everywhere")]
    IdenticalConstraints,
    #[error("constraints agree along the whole segment")]
    CoincidentOnSegment,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("workspace budget exceeded: {used} words in use, limit {limit}")]
    BudgetExceeded { used: usize, limit: usize },
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("point ({x}, {y}) lies outside the polygon")]
    OutsidePolygon { x: f64, y: f64 },
    #[error("no balanced vertical chord found for a region of {0} vertices")]
    NoBalancedChord(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("region has empty interior")]
    EmptyRegion,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
