use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:.3e} exceeds {bound:.3e}")]
    NonHermitianInput { deviation: f64, bound: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.6e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("trace of density matrix is {trace:.12} (must be 1)")]
    InvalidTrace { trace: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("Gram and block constructions of L_X differ by {difference:.3e}")]
    ConstructionMismatch { difference: f64 },

    #[error("kernel {label} is not defined at ({x:.6e}, {y:.6e})")]
    KernelDomain { label: String, x: f64, y: f64 },

    #[error("kernel contract violated: {0}")]
    KernelContract(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid monotone function {label}: {reason}")]
    InvalidMonotone { label: String, reason: String },

    #[error("unknown catalog label `{0}`")]
    UnknownLabel(String),

    #[error("invalid quadratic generator: {0}")]
    InvalidGenerator(String),

    #[error("M - I is singular (condition number {condition:.3e}) even after perturbation")]
    SingularM { condition: f64 },

    #[error("moments are already expressed in the quadrature basis")]
    AlreadyQuadrature,

    #[error("correlation matrix is not admissible: {0}")]
    NonSymplectic(String),

    #[error("principal logarithm undefined: {0}")]
    LogBranchFailure(String),

    #[error("Fock truncation supports 1 or 2 modes, got {0}")]
    UnsupportedModeCount(usize),

    #[error("cutoff {cutoff} is below the minimum {minimum}")]
    CutoffTooSmall { cutoff: usize, minimum: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
