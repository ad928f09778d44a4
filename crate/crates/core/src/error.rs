use thiserror::Error;

/// Errors raised by the library. Variant names double as the stable error
/// identifiers surfaced by the command line tool.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("EmptySet: {0} must not be empty")]
    EmptySet(&'static str),
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("TooManyGroundTruths: {gt} ground-truth points but only {pred} predictions")]
    TooManyGroundTruths { gt: usize, pred: usize },
    #[error("MissingFeature: prediction {index} has no neighbor feature")]
    MissingFeature { index: usize },
    #[error("OracleTooLarge: brute force supports at most {max} rows, got {rows}")]
    OracleTooLarge { rows: usize, max: usize },
    #[error("MissingBox: ground-truth point {index} has no head box")]
    MissingBox { index: usize },
    #[error("InvalidSpec: {0}")]
    InvalidSpec(String),
}

impl Error {
    /// Short identifier of the variant, e.g. `"TooManyGroundTruths"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptySet(_) => "EmptySet",
            Error::InvalidInput(_) => "InvalidInput",
            Error::TooManyGroundTruths { .. } => "TooManyGroundTruths",
            Error::MissingFeature { .. } => "MissingFeature",
            Error::OracleTooLarge { .. } => "OracleTooLarge",
            Error::MissingBox { .. } => "MissingBox",
            Error::InvalidSpec(_) => "InvalidSpec",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
