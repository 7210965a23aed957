use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model or graph parameter is outside its domain.
    #[error("invalid parameter `{name}`: {reason}")]
    Domain { name: &'static str, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index ({row}, {col}) out of range for dimension {dim}")]
    IndexOutOfRange { row: usize, col: usize, dim: usize },

    #[error("graph is not regular")]
    NotRegular,

    #[error("graph is not simple: {0}")]
    NotSimple(&'static str),

    #[error("cloud graph has {found} vertices but the base graph has degree {expected}")]
    CloudSizeMismatch { expected: usize, found: usize },

    #[error("invalid rotation map: {0}")]
    InvalidRotation(&'static str),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(&'static str),

    /// Non-positive or non-finite pivot met at this row of the factorization.
    #[error("matrix is not positive definite (pivot at row {row})")]
    NotPositiveDefinite { row: usize },

    #[error("dimension {dim} exceeds the dense oracle cap {cap}")]
    OracleCapExceeded { dim: usize, cap: usize },

    /// `1 + rho * sigma^2 * tr(D^-1)` came out non-positive. Cannot happen for a
    /// valid model; reaching it means an internal inconsistency.
    #[error("internal inconsistency: rank-one determinant factor {0} is not positive")]
    NonPositiveRankOneFactor(f64),
}

pub(crate) fn domain(name: &'static str, reason: &'static str) -> Error {
    Error::Domain { name, reason }
}
