use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("wavenumber {k} outside tabulated range [{lo}, {hi}]")]
    OutOfRange { k: f64, lo: f64, hi: f64 },

    #[error(
        "perturbative regime violated: |epsilon|^2 = {epsilon_sq:e} exceeds the threshold {threshold}"
    )]
    PerturbativeRegimeViolation { epsilon_sq: f64, threshold: f64 },

    #[error("phase table line {line}: {reason}")]
    TableParse { line: usize, reason: String },

    #[error("non-finite integrand in {context}")]
    NonFinite { context: &'static str },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("sector decomposition does not reproduce the state: round-trip residual {residual:e} exceeds {tolerance:e} at l_max = {l_max}; raise l_max or the grid size")]
    InsufficientLmax {
        l_max: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("{0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
