use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("Fock cutoff {dim} too small: tail mass {tail:.3e} exceeds tolerance {epsilon:.3e}")]
    CutoffTooSmall { dim: usize, tail: f64, epsilon: f64 },

    #[error("mode {mode} out of range for a {n_modes}-mode state")]
    InvalidMode { mode: usize, n_modes: usize },

    #[error("dimension {dim} exceeds the limit of {limit}")]
    DimensionOverflow { dim: usize, limit: usize },

    #[error("element is not unitary: max |U^dagger U - I| = {deviation:.3e}")]
    NonUnitary { deviation: f64 },

    #[error("density matrix is not positive: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("density matrix is not normalized: trace {trace}")]
    NotNormalized { trace: f64 },

    #[error("matrix is not Hermitian: max deviation {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("eigendecomposition failed to converge")]
    Eigensolver,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
