use thiserror::Error;

/// Errors raised by construction and verification routines.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("irreducible Clifford construction not implemented for l = {0} (supported: 1..=8)")]
    UnsupportedCliffordDim(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sigma deformation rejected: involution does not commute with generator {generator} (residual {residual:.3e})")]
    InvalidDeformation { generator: usize, residual: f64 },

    #[error("singular direction: pole basis is degenerate at the sampled V_u (sigma_min/sigma_max = {0:.3e})")]
    SingularDirection(f64),

    #[error("pole lies outside the real span of the basis (fit residual {0:.3e})")]
    InvalidPole(f64),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("quadrature spec invalid: {0}")]
    InvalidQuadrature(String),

    #[error("no orthogonal conjugator exists: singular value multisets differ by {0:.3e}")]
    NoConjugator(f64),

    #[error("incompatible spectrum comparison: {0}")]
    InvalidComparison(String),

    #[error("basis mismatch between the operator and the function")]
    BasisMismatch,

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("eigen-decomposition failed: {0}")]
    EigenFailure(String),
}
