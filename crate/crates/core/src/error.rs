use thiserror::Error;

/// Errors produced by the decompositions, generators and file codecs.
#[derive(Debug, Error)]
pub enum LowRankError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("relative error undefined: reference matrix has zero Frobenius norm")]
    UndefinedRatio,

    #[error("malformed {format} data: {reason}")]
    Format { format: &'static str, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LowRankError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        LowRankError::Config(msg.into())
    }

    pub(crate) fn format(format: &'static str, reason: impl Into<String>) -> Self {
        LowRankError::Format {
            format,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics themselves (as opposed to bad
    /// arguments or I/O). The CLI maps these to a distinct exit code.
    pub fn is_numeric(&self) -> bool {
        matches!(self, LowRankError::Convergence { .. } | LowRankError::UndefinedRatio)
    }
}

pub type Result<T> = std::result::Result<T, LowRankError>;
