use thiserror::Error;

/// Errors raised by the engine.
///
/// Mathematical failures that are part of the data (a nonzero `{H,H}`, a
/// failing axiom) are *not* errors; they are reported as values. The variants
/// below signal invalid input or a violated precondition.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CourantError {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("boundaries are not contained in the span of the cycles (column {column}); the differential does not square to zero")]
    ContainmentViolation { column: usize },

    #[error("context mismatch: elements belong to different graded contexts")]
    ContextMismatch,

    #[error("metric is singular")]
    SingularMetric,

    #[error("metric is not symmetric")]
    AsymmetricMetric,

    #[error("structure tensor is not totally antisymmetric: {0}")]
    Antisymmetry(String),

    #[error("anchor image is not isotropic: rho g^-1 rho^T != 0")]
    AnchorNotIsotropic,

    #[error("model does not satisfy the master equation {{H,H}} = 0")]
    MasterEquationFailed,

    #[error("element is not in the naive subalgebra generated by ker(rho)")]
    NotNaive,

    #[error("element is not a section (homogeneous of degree 1 in the fiber generators)")]
    NotSection,

    #[error("operator output is not homogeneous of the expected degree: {0}")]
    InternalConsistency(String),

    #[error("three-form is not closed: {0}")]
    NotClosed(String),

    #[error("structure constants violate the Jacobi identity: {0}")]
    JacobiViolation(String),

    #[error("model was not produced from a closed three-form; generalized exact data is missing")]
    NotGeneralizedExact,

    #[error("models are built over different Lie algebroids")]
    MismatchedAlgebroid,

    #[error("model has no transverse direction (transverse_count = 0)")]
    NoTransverseDirection,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, CourantError>;
