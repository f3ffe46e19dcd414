//! Crate-wide error type.

use thiserror::Error;

use crate::torus::TorusElement;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid seed: {0}")]
    InvalidSeed(String),

    #[error("cannot mutate at frozen vertex {0}")]
    MutationAtFrozenVertex(String),

    #[error("torus elements live over different seeds")]
    SeedMismatch,

    #[error("exponent vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("binomial divisor coefficient must be a unit ±u^k")]
    NonUnitDivisor,

    #[error("not divisible by the binomial; remainder has {} term(s)", .remainder.len())]
    NotDivisible { remainder: Box<TorusElement> },

    #[error("exponent is not mutable-balanced at vertex {vertex}: Σ Q(k,v)t_v = {numerator}/2 is not divisible by n = {n}")]
    NotMutableBalanced { vertex: String, numerator: i64, n: usize },

    #[error("mutation step {step} (vertex {vertex}) failed: {source}")]
    StepFailed {
        step: usize,
        vertex: String,
        #[source]
        source: Box<Error>,
    },

    #[error("polygon needs at least 3 sides, got {0}")]
    PolygonTooSmall(usize),

    #[error("not a triangulation: {0}")]
    NotATriangulation(String),

    #[error("flip not allowed: {0}")]
    FlipNotAllowed(String),

    #[error("cannot cut along boundary edge {0}")]
    CannotCutBoundary(usize),

    #[error("invalid surface: {0}")]
    InvalidSurface(String),

    #[error("inconsistent out-assignment: {0}")]
    InconsistentOutAssignment(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("unsupported arc: {0}")]
    UnsupportedArc(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
