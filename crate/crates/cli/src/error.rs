//! Error type with the exit-code contract:
//! 2 = unusable input (parse/validation/usage), 3 = divergence,
//! 4 = refusal to run an uncertified pair, 5 = degenerate construction,
//! 1 = everything else.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("solution diverged at step {step}, stage {stage}")]
    Divergence { step: usize, stage: usize },
    #[error(
        "tableau is not certified for unconditional energy decay; rerun with --force to override"
    )]
    NotCertified,
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) => 2,
            CliError::Divergence { .. } => 3,
            CliError::NotCertified => 4,
            CliError::Construction(_) => 5,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }
}
