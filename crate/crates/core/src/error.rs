use thiserror::Error;

use crate::causet::AdmissibilityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("covering relation has a cycle through point `{0}`")]
    Cycle(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("duplicate point identifier `{0}`")]
    DuplicatePoint(String),

    #[error("duplicate component name `{0}` in disjoint union")]
    DuplicateComponentName(String),

    #[error("causal set `{name}` has {points} points; at most {max} are supported")]
    TooManyPoints { name: String, points: usize, max: usize },

    #[error("region refers to spacetime `{found}`, expected `{expected}`")]
    SpacetimeMismatch { expected: String, found: String },

    #[error("map is not admissible: {0}")]
    NotAdmissible(AdmissibilityReport),

    #[error("maps are not composable: {0}")]
    NotComposable(String),

    #[error("component {component} of the source is split across target components")]
    SplitImage { component: usize },

    #[error("tensor map rejected: {0}")]
    NotTensorAdmissible(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("ambient dimension {dim} exceeds the configured cap {cap}")]
    MaxDimExceeded { dim: usize, cap: usize },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("element is not in the algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("representation is not faithful (kernel dimension {kernel_dim})")]
    NotFaithful { kernel_dim: usize },

    #[error("homomorphism contract violated: {0}")]
    InvalidHom(String),

    #[error("regions are not spacelike separated: `{0}` and `{1}` are causally related")]
    NotSpacelike(String, String),

    #[error("cover is not strictly increasing at position {0}")]
    NotIncreasing(usize),

    #[error("cover does not exactly exhaust the region: {0}")]
    NotCovering(String),

    #[error("region is not causally convex: {0}")]
    NotConvex(String),

    #[error("no intermediate type I factor found among {searched} candidates")]
    NoIntermediateFactor { searched: usize },

    #[error("region `{inner}` is not strictly contained in `{outer}`")]
    NotNested { inner: String, outer: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
