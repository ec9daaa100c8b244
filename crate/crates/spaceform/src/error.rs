use thiserror::Error;

use crate::algebra::SpaceFormKind;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} is invalid for the {kind} family ({constraint})")]
    InvalidDimension {
        kind: SpaceFormKind,
        dim: usize,
        constraint: &'static str,
    },
    #[error("curvature must be a nonzero finite number, got {0}")]
    InvalidCurvature(f64),
    #[error("vector length {actual} does not match dimension {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("structure set does not match the {0} family")]
    StructureMismatch(SpaceFormKind),
    #[error("{operation} is not defined for the real family")]
    NotDefinedForReal { operation: &'static str },
    #[error("power {power} is below the minimum {min} for the {kind} reduction")]
    PowerOutOfRange {
        kind: SpaceFormKind,
        power: usize,
        min: usize,
    },
    #[error("rho must lie in [0, 1], got {0}")]
    RhoOutOfRange(f64),
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("derivative stack needs at least {needed} entries, got {got}")]
    StackTooShort { needed: usize, got: usize },
    #[error("curve has zero speed; curvature profile is undefined")]
    DegenerateCurve,
    #[error("trajectory contains no states")]
    EmptyTrajectory,
    #[error("need at least {needed} sample points, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("initial data is inconsistent: {0}")]
    InvalidInitialData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
