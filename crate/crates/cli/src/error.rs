use thiserror::Error;

/// Exit status: success.
pub const EXIT_OK: u8 = 0;
/// Exit status: at least one validation check failed.
pub const EXIT_VALIDATION: u8 = 1;
/// Exit status: bad usage or configuration.
pub const EXIT_USAGE: u8 = 2;
/// Exit status: the configuration leaves the perturbative regime.
pub const EXIT_REGIME: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Regime(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Config(_) | Self::Io(_) => EXIT_USAGE,
            Self::Regime(_) => EXIT_REGIME,
        }
    }
}

impl From<packet_purity::Error> for CliError {
    fn from(e: packet_purity::Error) -> Self {
        match e {
            packet_purity::Error::PerturbativeRegimeViolation { .. } => Self::Regime(e.to_string()),
            packet_purity::Error::Io(msg) => Self::Io(msg),
            other => Self::Config(other.to_string()),
        }
    }
}
