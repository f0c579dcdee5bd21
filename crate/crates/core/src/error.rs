use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}×{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector length {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("Hermitian eigensolver did not converge")]
    EigenNoConvergence,

    #[error("Hamiltonian is not Hermitian (max |H - H†| = {0:e})")]
    NonHermitianHamiltonian(f64),

    #[error("operator {index} is not unitary")]
    NotUnitary { index: usize },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("negative time {0}")]
    NegativeTime(f64),

    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),

    #[error("times must be nondecreasing")]
    DecreasingTimes,

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("kick set is empty")]
    EmptyKickSet,

    #[error("superoperator is in the {found:?} picture, expected {expected:?}")]
    WrongPicture {
        expected: crate::semigroup::Picture,
        found: crate::semigroup::Picture,
    },

    #[error("invalid spectral model: {0}")]
    InvalidSpectralModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed JSON: {0}")]
    Json(String),
}
