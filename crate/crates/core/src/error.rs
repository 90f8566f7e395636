use alloc::string::String;

use crate::group::GroupId;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A truncation or weight threshold outside `(1, ∞)`.
    #[error("weight threshold {0} must exceed 1")]
    ThresholdTooSmall(f64),

    #[error("label does not belong to the dual of {0:?}")]
    LabelMismatch(GroupId),

    #[error("point does not belong to {0:?}")]
    PointMismatch(GroupId),

    #[error("grid resolution {resolution} cannot resolve {what}")]
    InadequateResolution { resolution: usize, what: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol is not a certified Hermitian positive semi-definite field")]
    NotCertified,

    #[error("symbol is not strictly positive definite on its support")]
    NotPositiveDefinite,

    #[error("coefficient field support does not match the kernel truncation")]
    SupportMismatch,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("analytic remainder {remainder:e} exceeds 1% of the finite sum {sum:e}")]
    InsufficientCutoff { sum: f64, remainder: f64 },

    #[error("optimisation failed: {0}")]
    OptimizationFailure(String),

    #[error("oracle supports at most two real dimensions, got {0}")]
    TooManyDimensions(usize),
}
