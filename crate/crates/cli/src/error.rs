use thiserror::Error;

/// Failure of a command, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad invocation or configuration.
    #[error("{0:#}")]
    Config(anyhow::Error),
    /// Missing, unreadable or malformed inputs and artifacts.
    #[error("{0:#}")]
    Data(anyhow::Error),
    /// Training produced a non-finite loss.
    #[error("{0:#}")]
    Divergence(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Divergence(_) => 3,
        }
    }

    /// Prefixes the message, keeping the classification.
    pub fn context(self, what: impl std::fmt::Display) -> Self {
        let wrap = |e: anyhow::Error| e.context(what.to_string());
        match self {
            CliError::Config(e) => CliError::Config(wrap(e)),
            CliError::Data(e) => CliError::Data(wrap(e)),
            CliError::Divergence(e) => CliError::Divergence(wrap(e)),
        }
    }
}

pub(crate) fn data(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Data(e.into())
}
