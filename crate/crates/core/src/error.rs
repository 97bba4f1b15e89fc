use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("could not place obstacle {placed} of {requested} without overlap after {attempts} attempts")]
    PlacementFailed {
        placed: usize,
        requested: usize,
        attempts: usize,
    },

    #[error("line {line}: field `{field}`: {reason}")]
    Parse {
        line: usize,
        field: String,
        reason: String,
    },

    #[error("grid spec mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    GridMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(line: usize, field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field: field.into(),
            reason: reason.into(),
        }
    }
}
