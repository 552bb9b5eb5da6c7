//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// Tail shapes admit no single closed-form tail for the result.
    #[error("incompatible tails: {0}")]
    IncompatibleTails(String),
    /// An exact result exists but leaves the representable closed-form class.
    #[error("result not representable in closed form: {0}")]
    UnrepresentableTail(String),
    /// Cohomology solution would violate the boundedness-at-infinity requirement.
    #[error("unbounded result: {0}")]
    UnboundedResult(String),
    /// Negative shift applied to a one-sided sequence.
    #[error("negative shift on a one-sided sequence")]
    NegativeShiftOneSided,
    /// Construction violates a structural invariant.
    #[error("invalid data: {0}")]
    Invalid(String),
    /// Dilation of a dyadically-tailed function by a non power of two.
    #[error("non-dyadic dilation: factor {0} is not a power of two")]
    NonDyadicDilation(String),
    /// An integral or series diverges where a finite value is required.
    #[error("divergent integral: {0}")]
    DivergentIntegral(String),
    /// Numeric-tier failure (eigensolver, tie at threshold).
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    /// Singular value within tolerance of a spectral threshold.
    #[error("tie at threshold: {0}")]
    TieAtThreshold(String),
    /// Dyadic cell lengths cannot be tiled by the target algebra's atoms.
    #[error("not tileable: {0}")]
    NotTileable(String),
    /// Operation requires the exact tier (diagonal or commutative data).
    #[error("exact tier required: {0}")]
    ExactTierRequired(String),
    /// A closed form exists in principle but is not implemented for this shape.
    #[error("no closed form: {0}")]
    NonClosedForm(String),
    /// Malformed input (JSON, CLI arguments).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
