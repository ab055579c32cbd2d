use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised while constructing or combining states.
///
/// Validation variants carry the measured violation so callers can report how
/// far an input is from the admissible set.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m_ij - conj(m_ji)| = {violation:.3e}")]
    NotHermitian { violation: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue = {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is not one: |Tr - 1| = {deviation:.3e}")]
    TraceNotOne { deviation: f64 },
    #[error("state vector is not normalized: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },
    #[error("basis is not orthonormal: max |B^dag B - I| = {violation:.3e}")]
    BasisNotOrthonormal { violation: f64 },
    #[error("Bloch vector norm {norm:.12} exceeds one")]
    NormExceedsOne { norm: f64 },
    #[error("probability {value} outside [0, 1]")]
    OutOfRange { value: f64 },
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("input contains NaN or infinite values")]
    NonFinite,
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimMismatch(msg.into())
    }
}
