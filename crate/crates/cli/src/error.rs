use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line} ({block}): {message}")]
    Parse { line: usize, block: String, message: String },
    #[error(transparent)]
    Core(#[from] twistcalc_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// Exit status: every error is a precondition or input failure.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
