use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("operator is not block diagonal for this inclusion (off-block norm {0:e})")]
    NotBlockDiagonal(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("state is not faithful ({0}); use the projected construction")]
    NotFaithful(String),

    #[error("outside the admissible domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("entropy difference {delta_s:e} exceeds the sufficiency threshold")]
    NotSufficient { delta_s: f64 },

    #[error("family is not admissible: ‖ζ_λ − ψ‖²/λ = {ratio:e} at λ = {lambda:e}")]
    NotAdmissible { lambda: f64, ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn shape_err(expected: impl ToString, got: impl ToString) -> Error {
    Error::Dimension {
        expected: expected.to_string(),
        got: got.to_string(),
    }
}
