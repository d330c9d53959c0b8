use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, GlossError>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GlossError {
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("non-finite iterate at inner iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("class {class} has no observations")]
    EmptyClass { class: usize },

    #[error("label {label} is out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },

    #[error("at least two classes are required, found {found}")]
    TooFewClasses { found: usize },

    #[error("indicator row {row} does not contain exactly one 1")]
    InvalidIndicator { row: usize },

    #[error("no discriminative direction: every alpha is below {tol:e}")]
    NoDiscriminativeDirection { tol: f64 },

    #[error("eigen post-processing input is asymmetric (relative asymmetry {asymmetry:e})")]
    AsymmetricScoreMatrix { asymmetry: f64 },

    #[error("feature {feature} has zero variance and cannot be standardized")]
    ZeroVariance { feature: usize },

    #[error("class {class} has {count} examples, fewer than the {folds} folds requested")]
    ClassTooSmall {
        class: usize,
        count: usize,
        folds: usize,
    },

    #[error("the true support is empty")]
    EmptyTruth,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("fit {index} on the path (lambda = {lambda:e}) failed: {source}")]
    PathFit {
        index: usize,
        lambda: f64,
        source: Box<GlossError>,
    },
}

impl GlossError {
    /// True for failures of the numerical procedure itself, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            GlossError::NotPositiveDefinite { .. }
            | GlossError::NonFinite { .. }
            | GlossError::NoDiscriminativeDirection { .. }
            | GlossError::AsymmetricScoreMatrix { .. } => true,
            GlossError::PathFit { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
