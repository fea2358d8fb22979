use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The matrix form of the sequence needs a nonempty binary expansion.
    #[error("the matrix representation is undefined for n = 0")]
    ZeroIndex,

    #[error("argument {value} is outside the allowed range {range}")]
    OutOfRange { value: String, range: &'static str },

    #[error("level {level} exceeds the supported maximum {max}")]
    LevelTooLarge { level: u32, max: u32 },

    #[error("invalid Fourier settings: {0}")]
    InvalidSettings(String),

    #[error("cannot parse {input:?} as a dyadic rational: {reason}")]
    Parse { input: String, reason: String },

    #[error("exact identity violated: {0}")]
    IdentityViolated(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range(value: impl ToString, range: &'static str) -> Error {
    Error::OutOfRange {
        value: value.to_string(),
        range,
    }
}
