use thiserror::Error;

use crate::hilbert::Representation;
use crate::statistics::Regime;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("basis arity mismatch")]
    ArityMismatch,

    #[error("representation mismatch: expected {expected}, found {found}")]
    RepresentationMismatch {
        expected: Representation,
        found: Representation,
    },

    #[error("cannot normalize null state")]
    NullState,

    #[error("state is not normalized (norm = {0})")]
    Unnormalized(f64),

    #[error("coin operator is not unitary (max |U†U - I| = {0:e})")]
    NonUnitaryCoin(f64),

    #[error("lattice bound exceeded: position {position} outside ±{bound}")]
    LatticeBoundExceeded { position: i32, bound: i32 },

    #[error("step count must be non-negative, got {0}")]
    NegativeSteps(i64),

    #[error("photon outside detector plane: {0}")]
    OutsideDetectorPlane(String),

    #[error("{regime} regime cannot evolve a state in the {found} representation")]
    RegimeMismatch {
        regime: Regime,
        found: Representation,
    },

    #[error("pair coefficients not normalized: a^2 + b^2 = {0}")]
    UnnormalizedCoefficients(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("coin operator has no wave-plate description and cannot be printed")]
    UnprintableCoin,
}
