use thiserror::Error;

/// Errors shared across the library. Fan validation reports structured
/// diagnostics instead (see [`crate::fan::Diagnostic`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("generators are linearly dependent over the rationals")]
    DependentGenerators,
    #[error("fan is not complete")]
    NotComplete,
    #[error("cone is not a face of the fan")]
    ConeNotInFan,
    #[error("fan is not projective: the Mori cone contains a line")]
    NotProjective,
    #[error("rays do not span the ambient space")]
    RaysDoNotSpan,
    #[error("the given vectors span the zero subspace")]
    ZeroSubspace,
    #[error("wall classes on an extremal ray disagree in sign pattern")]
    InconsistentSigns,
    #[error("unknown fan name: {0}")]
    UnknownName(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ray index {0} out of range")]
    RayOutOfRange(usize),
    #[error("extremal ray index {0} out of range")]
    ExtremalRayOutOfRange(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
