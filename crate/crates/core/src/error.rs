use thiserror::Error;

/// Failures surfaced by the library. Variant names double as the error
/// identifiers reported by the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field descriptor: {0}")]
    InvalidField(String),
    #[error("zero scalar where a unit is required")]
    ZeroScalar,
    #[error("zero input where a nonzero value is required")]
    ZeroInput,
    #[error("transform is singular")]
    SingularTransform,
    #[error("input matrix is singular")]
    SingularInput,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("form has the wrong symmetry for this operation")]
    WrongSymmetry,
    #[error("matrix is not hermitian with the claimed sign")]
    NotHermitian,
    #[error("form is degenerate")]
    DegenerateInput,
    #[error("values live over different fields or signs")]
    ContextMismatch,
    #[error("operation not available in this context: {0}")]
    WrongContext(String),
    #[error("Lagrangians belong to different hyperbolic spaces")]
    SpaceMismatch,
    #[error("subspace is not a Lagrangian: {0}")]
    NotLagrangian(String),
    #[error("matrix is not unitary for the hyperbolic form")]
    NotUnitary,
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("no Lagrangian found: {0}")]
    NotFound(String),
    #[error("Lagrangians are not opposite")]
    NotOpposite,
    #[error("Lagrangians are not pairwise opposite")]
    NotPairwiseOpposite,
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("pair is not generic: {0}")]
    NonGeneric(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Variant name, stable across releases.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidField(_) => "InvalidField",
            Error::ZeroScalar => "ZeroScalar",
            Error::ZeroInput => "ZeroInput",
            Error::SingularTransform => "SingularTransform",
            Error::SingularInput => "SingularInput",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::WrongSymmetry => "WrongSymmetry",
            Error::NotHermitian => "NotHermitian",
            Error::DegenerateInput => "DegenerateInput",
            Error::ContextMismatch => "ContextMismatch",
            Error::WrongContext(_) => "WrongContext",
            Error::SpaceMismatch => "SpaceMismatch",
            Error::NotLagrangian(_) => "NotLagrangian",
            Error::NotUnitary => "NotUnitary",
            Error::TooLarge(_) => "TooLarge",
            Error::NotFound(_) => "NotFound",
            Error::NotOpposite => "NotOpposite",
            Error::NotPairwiseOpposite => "NotPairwiseOpposite",
            Error::ConstraintViolated(_) => "ConstraintViolated",
            Error::NonGeneric(_) => "NonGeneric",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
