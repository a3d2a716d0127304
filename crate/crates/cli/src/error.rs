use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Lib(#[from] lamella::Error),

    #[error("cannot read {0}: {1}")]
    Read(String, io::Error),

    #[error("cannot write {0}: {1}")]
    Write(String, io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 usage, 3 violated hypothesis or precondition, 4 numerical or output failure.
    pub fn exit_code(&self) -> i32 {
        use lamella::Error as E;
        match self {
            CliError::Usage(_) | CliError::Lib(E::InvalidParameter(_)) => 2,
            CliError::Read(..)
            | CliError::Lib(
                E::HypothesisViolation { .. }
                | E::MassMismatch { .. }
                | E::SameSpin(..)
                | E::Format(_)
                | E::ConstraintViolation { .. }
                | E::JumpCollision { .. },
            ) => 3,
            CliError::Lib(
                E::NonConvergence { .. }
                | E::NonZeroMean { .. }
                | E::NotSymmetric { .. }
                | E::BracketFailure { .. },
            )
            | CliError::Write(..)
            | CliError::Csv(_)
            | CliError::Json(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Lib(lamella::Error::HypothesisViolation { a, bound, k }) => format!(
                "hypothesis violated: a = {a} must be below pi*sqrt(k/(2 gamma)) = {bound:.4} (k = {k}); exact bound {bound}"
            ),
            other => other.to_string(),
        }
    }
}
